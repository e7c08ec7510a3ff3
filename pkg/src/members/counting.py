"""다중 피크 부재 개수 추정, 타이/브레이스 분류"""

import logging
from typing import NamedTuple, Sequence, Union

import numpy as np

from ..cloud import Axis, PointCloud, baseline_runs, histogram_of
from ..errors import ParameterError
from ..geometry.frame import as_xyz
from .types import MemberCategory

logger = logging.getLogger(__name__)


class PeakCount(NamedTuple):
    """부재 개수와 각 부재의 좌표 구간 [(lo, hi), ...]"""
    count: int
    intervals: list


def count_members_by_peaks(
    points: Union[PointCloud, np.ndarray],
    axis: Axis,
    bin_size: float,
) -> PeakCount:
    """
    히스토그램 baseline 교차로 부재 개수 추정

    baseline = 전체 점 수 / bin 수 (빈 bin 포함). bin을 오름차순으로 훑으며
    baseline을 초과한 뒤 다시 이하로 떨어지는(또는 범위 끝에 닿는) 구간 하나를 부재 하나로 셉니다.

    Args:
        points: 변환 좌표의 점 (N, 3) 또는 좌표값 1차원 배열
        axis: Axis.A1 또는 Axis.A2
        bin_size: bin 크기 (m)
    """
    if axis not in (Axis.A1, Axis.A2):
        raise ParameterError("axis must be a1 or a2")

    if isinstance(points, PointCloud) or np.ndim(points) == 2:
        values = as_xyz(points)[:, axis.column]
    else:
        values = np.asarray(points, dtype=np.float64)

    hist = histogram_of(values, bin_size, axis)
    runs = baseline_runs(hist.counts)
    intervals = [(hist.lower_edge(start), hist.upper_edge(end)) for start, end in runs]

    logger.info(f"부재 개수({axis.value}): {len(runs)} (bin {hist.n_bins}개, baseline {hist.total / hist.n_bins:.1f})")
    return PeakCount(len(runs), intervals)


def _extent(xyz: np.ndarray) -> float:
    """경계 상자 대각선 길이"""
    if len(xyz) == 0:
        return 0.0
    return float(np.linalg.norm(xyz.max(axis=0) - xyz.min(axis=0)))


def classify_tie_brace(clusters: Sequence, min_brace_extent: float = 0.0) -> list:
    """
    군집 크기로 타이/브레이스 분류

    baseline = 군집 크기 평균. 크기 < baseline 이면 타이, 그 외는 브레이스입니다.
    min_brace_extent > 0 이면 경계 상자 대각선이 그보다 짧은 군집은 타이로 둡니다.

    Args:
        clusters: 군집별 점 좌표 배열 (또는 PointCloud) 목록
        min_brace_extent: 브레이스가 될 수 있는 최소 크기 (m)

    Returns:
        군집별 MemberCategory 목록
    """
    if len(clusters) == 0:
        raise ParameterError("at least one cluster is required")
    if min_brace_extent < 0:
        raise ParameterError("min_brace_extent must be >= 0")

    arrays = [as_xyz(c) for c in clusters]
    sizes = np.array([len(a) for a in arrays], dtype=np.float64)
    baseline = sizes.mean()

    if len(arrays) == 1:
        logger.warning("군집이 하나뿐이라 타이/브레이스 분류 기준이 자기 크기와 같습니다.")
    elif np.all(sizes == sizes[0]):
        logger.warning("모든 군집 크기가 같아 타이/브레이스 분류가 불명확합니다.")

    categories = []
    for xyz, size in zip(arrays, sizes):
        if size < baseline or _extent(xyz) < min_brace_extent:
            categories.append(MemberCategory.TIE)
        else:
            categories.append(MemberCategory.BRACE)

    n_ties = sum(c is MemberCategory.TIE for c in categories)
    logger.info(f"타이/브레이스 분류: 타이 {n_ties}개, 브레이스 {len(categories) - n_ties}개 (baseline {baseline:.1f})")
    return categories
