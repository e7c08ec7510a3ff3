"""예외 계층 정의

입력/검증 오류(InputError)는 CLI 종료 코드 2, 기하/파이프라인 오류(GeometryError)는
종료 코드 3으로 매핑됩니다.
"""

from typing import Iterable, Optional


class FormworkError(Exception):
    """모든 도메인 예외의 베이스"""

    exit_code = 1


# =============================================================================
# 입력 / 검증 (exit 2)
# =============================================================================

class InputError(FormworkError):
    exit_code = 2


class ParameterError(InputError, ValueError):
    """잘못된 파라미터 (bin_size <= 0 등)"""


class PlyParseError(InputError):
    """PLY 파싱 실패 - 줄 번호 포함"""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ConfigError(InputError):
    """설정 검증 실패 - 문제 키 포함"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(message)


class SceneSpecError(InputError):
    """SceneSpec 검증 실패 - 문제 필드 포함"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(message)


class PairingError(InputError):
    """측정값과 기준값의 라벨 매칭 실패"""

    def __init__(self, message: str, orphans: Optional[Iterable[str]] = None):
        self.orphans = list(orphans or [])
        if self.orphans:
            message = f"{message}: {', '.join(self.orphans)}"
        super().__init__(message)


class DomainError(InputError, ValueError):
    """MAPE 분모가 0 이하"""


# =============================================================================
# 기하 / 파이프라인 (exit 3)
# =============================================================================

class GeometryError(FormworkError):
    exit_code = 3


class EmptyCloudError(GeometryError, ValueError):
    def __init__(self, message: str = "empty cloud"):
        super().__init__(message)


class InsufficientPointsError(GeometryError, ValueError):
    """연산에 필요한 점 개수 부족 (SOR의 k >= 점 개수 등)"""


class FitFailure(GeometryError):
    """RANSAC 모델 추정 실패"""


class DegenerateGeometryError(GeometryError):
    """공분산 rank 부족 등 퇴화된 형상"""


class AmbiguousDirectionError(GeometryError):
    """제3주축 방향 판별 불가"""


class SegmentationError(GeometryError):
    """개수 추정과 분할 결과가 일치하지 않음"""


class PipelineStepError(GeometryError):
    """파이프라인 단계 실패 - 단계 이름 포함"""

    def __init__(self, step: str, cause: Exception):
        self.step = step
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)
        super().__init__(f"step '{step}' failed: {cause}")
