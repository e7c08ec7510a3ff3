"""여러 케이스 보고서를 카테고리 x 지표 표로 요약"""

import logging
from typing import Sequence

import pandas as pd

from ..errors import ParameterError
from ..members import CATEGORY_ORDER
from .metrics import mae, mape

logger = logging.getLogger(__name__)

MISSING = "-"
METRICS = ("MAE (mm)", "MAPE (%)")


def _pairs(report, category=None) -> tuple:
    pc, mt = [], []
    for row in report.rows():
        if category is not None and row["category"] != category.value:
            continue
        if row["mt_mm"] is not None:
            pc.append(row["pc_mm"])
            mt.append(row["mt_mm"])
    return pc, mt


def _cells(pc: list, mt: list) -> list:
    if not pc:
        return [MISSING, MISSING]
    return [f"{mae(pc, mt):.2f}", f"{mape(pc, mt):.2f}"]


def summarize_cases(reports: Sequence) -> pd.DataFrame:
    """
    케이스별 MAE/MAPE 표

    행 = (부재, 지표), 열 = 케이스 라벨 + All.
    All 열은 해당 부재의 모든 케이스 쌍을 합쳐 계산하고, 마지막 All 행은 모든 부재를 합칩니다.
    없는 조합은 "-"로 표시합니다.

    Args:
        reports: 기준값이 포함된 SpacingReport 목록

    Returns:
        문자열 값(소수점 2자리)의 DataFrame
    """
    reports = [r for r in reports if r.has_metrics]
    if not reports:
        raise ParameterError("no report with reference values to summarize")

    labels = [r.case_label for r in reports]
    if len(set(labels)) != len(labels):
        raise ParameterError("case labels must be unique")

    present = [c for c in CATEGORY_ORDER if any(c in r.blocks for r in reports)]

    index = []
    rows = []
    for category in present + [None]:
        name = "All" if category is None else category.title
        columns = []
        pooled_pc, pooled_mt = [], []
        for report in reports:
            pc, mt = _pairs(report, category)
            columns.append(_cells(pc, mt))
            pooled_pc += pc
            pooled_mt += mt
        columns.append(_cells(pooled_pc, pooled_mt))

        for k, metric in enumerate(METRICS):
            index.append((name, metric))
            rows.append([cells[k] for cells in columns])

    table = pd.DataFrame(
        rows,
        index=pd.MultiIndex.from_tuples(index, names=["member", "metric"]),
        columns=labels + ["All"],
    )
    logger.info(f"케이스 요약: {len(reports)}개 케이스, 부재 {len(present)}종")
    return table
