"""간격 측정 파이프라인 실행 모듈

단계 순서: 통과 필터 -> 지면 제거 -> 이상점 제거 -> 다운샘플링 -> 스터드 좌표계 -> 변환
-> 월레 분할 -> 제3주축 방향 -> 타이/브레이스 군집 -> 개수 추정 -> 분류 -> 인식 -> 간격 -> 보고서
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from ..cloud import Axis, PointCloud
from ..errors import FitFailure, PipelineStepError
from ..geometry import detect_stud_frame, transform_to_frame
from ..ingest import PipelineConfig, ReferenceMeasurements, write_ply
from ..members import (
    MemberCategory,
    classify_tie_brace,
    cluster_ties_braces,
    count_members_by_peaks,
    identify_axis3_direction,
    recognize_members,
    segment_wales,
)
from ..preprocess import (
    centered_grid_anchor,
    pass_through,
    remove_ground,
    statistical_outlier_removal,
    voxel_downsample,
)
from ..spacing import build_report, measure_spacing

logger = logging.getLogger(__name__)

STEPS = (
    "crop",
    "ground_removal",
    "outlier_removal",
    "downsample",
    "stud_frame",
    "transform",
    "wale_segmentation",
    "axis3_direction",
    "tie_brace_clustering",
    "member_counting",
    "tie_brace_classification",
    "member_recognition",
    "spacing",
    "report",
)

STUD_COLOR = (128, 0, 128)
WALE_COLOR = (0, 160, 0)
OTHER_COLOR = (128, 128, 128)
MEMBER_PALETTE = (
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40), (148, 103, 189),
    (140, 86, 75), (227, 119, 194), (127, 127, 127), (188, 189, 34), (23, 190, 207),
)


def _elapsed_ms(start: datetime) -> float:
    return (datetime.now() - start).total_seconds() * 1000


def _colored(cloud: PointCloud, groups: list) -> PointCloud:
    """[(인덱스, 색)] 으로 색칠한 부분 클라우드 (지정된 점만)"""
    if not groups:
        return PointCloud.empty(with_color=True)
    index = np.concatenate([np.asarray(idx, dtype=np.int64) for idx, _ in groups])
    rgb = np.vstack([np.tile(color, (len(idx), 1)) for idx, color in groups])
    return PointCloud(cloud.xyz[index], rgb)


class MeasurementPipeline:
    """포인트 클라우드 -> 부재 간격 보고서"""

    def __init__(self, config: PipelineConfig):
        """
        Args:
            config: 파이프라인 설정
        """
        self.config = config

    def run(
        self,
        cloud: PointCloud,
        references: Optional[ReferenceMeasurements] = None,
        case_label: str = "case",
    ) -> dict:
        """
        파이프라인 실행 (단계 실패 시에도 예외 대신 결과 dict 반환)

        Args:
            cloud: 원본 스캔 클라우드
            references: 기준값 (있으면 MAE/MAPE 블록 생성)
            case_label: 보고서 케이스 이름

        Returns:
            {
                "success": bool,
                "report": SpacingReport | None,
                "members": MemberSet | None,
                "stages": dict[str, PointCloud],  # 단계별 클라우드
                "error": str | None,
                "failed_step": str | None,
                "exit_code": int,
                "execution_info": {
                    "elapsed_ms": float,
                    "steps": dict[str, float]  # 단계별 elapsed_ms
                }
            }
        """
        start_time = datetime.now()
        timings = {}
        stages = {"01_raw": cloud}
        state = {"report": None, "members": None}

        def step(name: str, fn: Callable):
            step_start = datetime.now()
            try:
                return fn()
            except Exception as e:
                raise PipelineStepError(name, e) from e
            finally:
                timings[name] = _elapsed_ms(step_start)

        try:
            self._execute(cloud, references, case_label, step, stages, state)
            return {
                "success": True,
                "report": state["report"],
                "members": state["members"],
                "stages": stages,
                "error": None,
                "failed_step": None,
                "exit_code": 0,
                "execution_info": {
                    "elapsed_ms": _elapsed_ms(start_time),
                    "steps": timings,
                },
            }

        except PipelineStepError as e:
            logger.error(f"파이프라인 실패: {e}")
            return {
                "success": False,
                "report": None,
                "members": state["members"],
                "stages": stages,
                "error": str(e),
                "failed_step": e.step,
                "exit_code": e.exit_code,
                "execution_info": {
                    "elapsed_ms": _elapsed_ms(start_time),
                    "steps": timings,
                },
            }

    def _execute(self, cloud, references, case_label, step, stages, state) -> None:
        cfg = self.config

        cropped = step("crop", lambda: pass_through(cloud, cfg.crop_box, cfg.crop_keep))
        stages["02_cropped"] = cropped

        def _ground():
            result = remove_ground(cropped, cfg.ground_bin_size)
            if len(result) == 0:
                raise FitFailure("no stud plane found: no points left after ground removal")
            return result

        degrounded = step("ground_removal", _ground)
        stages["03_ground_removed"] = degrounded

        kept, removed = step(
            "outlier_removal",
            lambda: statistical_outlier_removal(degrounded, cfg.sor_k, cfg.sor_std_ratio),
        )
        stages["04_outlier_removed"] = kept
        stages["04_outliers"] = removed

        downsampled = step(
            "downsample",
            lambda: voxel_downsample(kept, cfg.voxel_size, anchor=centered_grid_anchor(kept, cfg.voxel_size)),
        )
        stages["05_downsampled"] = downsampled

        frame, stud_idx = step("stud_frame", lambda: detect_stud_frame(downsampled, cfg))
        transformed = step("transform", lambda: transform_to_frame(downsampled, frame))
        stages["06_transformed"] = transformed

        non_stud = np.setdiff1d(np.arange(len(transformed)), stud_idx)
        wale_local, rest_local = step(
            "wale_segmentation", lambda: segment_wales(transformed.xyz[non_stud], cfg),
        )
        wale_idx = non_stud[wale_local]
        rest_idx = non_stud[rest_local]

        sign = step(
            "axis3_direction",
            lambda: identify_axis3_direction(transformed.xyz[stud_idx], transformed.xyz[wale_idx]),
        )
        wale_a3 = float(transformed.xyz[wale_idx, 2].mean())

        cluster_local = step(
            "tie_brace_clustering",
            lambda: cluster_ties_braces(
                transformed.xyz[rest_idx], cfg.dbscan_eps, cfg.dbscan_min_points,
                axis3_sign=sign, wale_a3=wale_a3, margin=cfg.ransac_distance,
            ),
        )
        clusters = [rest_idx[c] for c in cluster_local]

        stud_peaks, wale_peaks = step(
            "member_counting",
            lambda: (
                count_members_by_peaks(transformed.xyz[stud_idx], Axis.A2, cfg.member_bin_size),
                count_members_by_peaks(transformed.xyz[wale_idx], Axis.A1, cfg.member_bin_size),
            ),
        )

        categories = step(
            "tie_brace_classification",
            lambda: classify_tie_brace([transformed.xyz[c] for c in clusters], cfg.brace_min_extent)
            if clusters else [],
        )

        members = step(
            "member_recognition",
            lambda: recognize_members(
                transformed, stud_idx, wale_idx, clusters, categories,
                stud_peaks, wale_peaks, frame, sign, cfg,
            ),
        )
        state["members"] = members

        stages["07_segmented"] = _colored(
            transformed,
            [(stud_idx, STUD_COLOR), (wale_idx, WALE_COLOR)] + [(c, OTHER_COLOR) for c in clusters],
        )
        stages["08_recognized"] = _colored(
            transformed,
            [(m.indices, MEMBER_PALETTE[k % len(MEMBER_PALETTE)]) for k, m in enumerate(members.all_members())],
        )

        results = step("spacing", lambda: measure_spacing(members))
        state["report"] = step("report", lambda: build_report(results, references, case_label))

        counts = members.counts()
        logger.info(
            f"측정 완료: 스터드 {counts[MemberCategory.STUD]}, 월레 {counts[MemberCategory.WALE]}, "
            f"타이 {counts[MemberCategory.TIE]}, 브레이스 {counts[MemberCategory.BRACE]}"
        )


def dump_stages(stages: dict, output_dir: Union[str, Path]) -> list:
    """단계별 클라우드를 <이름>.ply로 저장"""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    paths = []
    for name in sorted(stages):
        path = output_dir / f"{name}.ply"
        write_ply(stages[name], path)
        paths.append(path)
    return paths
