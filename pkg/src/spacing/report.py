"""부재 간격 측정 및 비교 보고서 구성"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..cloud import Axis
from ..errors import PairingError, ParameterError
from ..ingest.references import ReferenceMeasurements
from ..members import CATEGORY_ORDER, MemberCategory, MemberSet, pair_label
from .metrics import mae, mape, std_abs_error, std_pct_error

logger = logging.getLogger(__name__)

MM_PER_M = 1000.0


@dataclass(frozen=True)
class SpacingResult:
    """인접 부재 쌍의 간격 (R^pc, mm)"""

    category: MemberCategory
    pair_label: str
    value_mm: float
    axis: Axis

    def __post_init__(self):
        if not self.value_mm > 0:
            raise ParameterError(f"spacing for '{self.pair_label}' must be > 0")


@dataclass(frozen=True)
class ComparisonBlock:
    """카테고리 (또는 전체) 비교 지표"""

    category: Optional[MemberCategory]
    case_label: str
    mae_mm: float
    mape_pct: float
    n: int
    std_mm: float = 0.0
    std_pct: float = 0.0

    @property
    def name(self) -> str:
        return "All" if self.category is None else self.category.title


@dataclass(frozen=True)
class SpacingReport:
    """
    간격 측정 보고서

    Args:
        case_label: 케이스 이름
        results: 측정 간격 목록 (카테고리 순서: 스터드, 월레, 타이, 브레이스)
        references: 라벨로 매칭된 기준값 (없으면 None)
        blocks: 카테고리별 비교 지표
        all_block: 모든 쌍을 합친 비교 지표
    """

    case_label: str
    results: tuple
    references: Optional[ReferenceMeasurements] = None
    blocks: dict = field(default_factory=dict)
    all_block: Optional[ComparisonBlock] = None

    @property
    def has_metrics(self) -> bool:
        return self.all_block is not None

    def categories(self) -> list:
        present = {r.category for r in self.results}
        return [c for c in CATEGORY_ORDER if c in present]

    def results_for(self, category: MemberCategory) -> list:
        return [r for r in self.results if r.category is category]

    def rows(self) -> list:
        """쌍별 행 - category, label, pc_mm, mt_mm, abs_err_mm"""
        rows = []
        for r in self.results:
            mt = None
            if self.references is not None:
                mt = self.references.get(r.category).get(r.pair_label)
            rows.append({
                "category": r.category.value,
                "label": r.pair_label,
                "pc_mm": r.value_mm,
                "mt_mm": mt,
                "abs_err_mm": None if mt is None else abs(r.value_mm - mt),
            })
        return rows


def measure_spacing(member_set: MemberSet) -> list:
    """
    인접 번호 부재 간 정렬축 평균 차이 (mm)

    스터드/브레이스는 a2, 월레는 a1, 타이는 같은 그룹 안에서 a2 기준입니다.
    부재가 2개 미만인 카테고리(또는 타이 그룹)는 쌍을 만들지 않습니다.
    """
    results = []

    def _pairs(category: MemberCategory, members: Sequence) -> None:
        axis = category.ordering_axis
        for first, second in zip(members, members[1:]):
            value = (second.mean_on(axis) - first.mean_on(axis)) * MM_PER_M
            results.append(SpacingResult(
                category=category,
                pair_label=pair_label(category, first.label, second.label),
                value_mm=value,
                axis=axis,
            ))

    for category in CATEGORY_ORDER:
        if category is MemberCategory.TIE:
            for members in member_set.tie_groups().values():
                _pairs(category, members)
        else:
            _pairs(category, member_set.get(category))

    logger.info(f"간격 측정: {len(results)}개 쌍")
    return results


def _block(category, case_label: str, pc: list, mt: list) -> ComparisonBlock:
    return ComparisonBlock(
        category=category,
        case_label=case_label,
        mae_mm=mae(pc, mt),
        mape_pct=mape(pc, mt),
        n=len(pc),
        std_mm=std_abs_error(pc, mt),
        std_pct=std_pct_error(pc, mt),
    )


def build_report(
    results: Sequence[SpacingResult],
    references: Optional[ReferenceMeasurements] = None,
    case_label: str = "case",
) -> SpacingReport:
    """
    측정 결과와 기준값을 라벨로 매칭해 보고서 구성

    기준값이 있으면 카테고리별 블록과, 모든 쌍을 합쳐 계산한 All 블록을 만듭니다.
    어느 한쪽에만 있는 라벨은 하나의 PairingError로 모두 보고합니다.
    """
    results = tuple(results)
    if references is None:
        return SpacingReport(case_label=case_label, results=results)

    measured = {(r.category, r.pair_label) for r in results}
    expected = {(c, label) for c in references.categories() for label in references.get(c)}
    orphan_keys = sorted(measured ^ expected, key=lambda x: (CATEGORY_ORDER.index(x[0]), x[1]))
    orphans = [label for _, label in orphan_keys]
    if orphans:
        raise PairingError("unmatched spacing labels", orphans)

    blocks = {}
    pooled_pc, pooled_mt = [], []
    for category in CATEGORY_ORDER:
        pairs = [(r.value_mm, references.get(category)[r.pair_label]) for r in results if r.category is category]
        if not pairs:
            continue
        pc = [p for p, _ in pairs]
        mt = [m for _, m in pairs]
        blocks[category] = _block(category, case_label, pc, mt)
        pooled_pc += pc
        pooled_mt += mt

    all_block = _block(None, case_label, pooled_pc, pooled_mt) if pooled_pc else None
    if all_block is not None:
        logger.info(f"비교 지표({case_label}): MAE {all_block.mae_mm:.2f} mm, MAPE {all_block.mape_pct:.2f}%")

    return SpacingReport(
        case_label=case_label,
        results=results,
        references=references,
        blocks=blocks,
        all_block=all_block,
    )
