"""부재 인식 및 번호 부여"""

import logging
from typing import TYPE_CHECKING, Sequence

import numpy as np

from ..cloud import PointCloud
from ..errors import SegmentationError
from ..geometry import Frame, ransac_line
from .counting import PeakCount
from .types import Member, MemberCategory, MemberSet

if TYPE_CHECKING:
    from ..ingest.config import PipelineConfig

logger = logging.getLogger(__name__)

# 부재별 RANSAC 직선 시드 오프셋
LINE_SEED_BASE = 100


def _interval_distance(values: np.ndarray, intervals: list) -> np.ndarray:
    """(점 수, 구간 수) 거리 행렬 - 구간 안이면 0"""
    lo = np.array([a for a, _ in intervals])
    hi = np.array([b for _, b in intervals])
    v = values[:, None]
    return np.maximum(np.maximum(lo - v, v - hi), 0.0)


def partition_by_intervals(values: np.ndarray, intervals: list, max_distance: float) -> list:
    """
    각 점을 가장 가까운 구간에 배정

    Returns:
        구간별 위치 인덱스 배열 목록 (max_distance보다 먼 점은 제외)
    """
    if not intervals:
        return []
    dist = _interval_distance(values, intervals)
    nearest = np.argmin(dist, axis=1)
    assigned = dist[np.arange(len(values)), nearest] <= max_distance
    return [np.flatnonzero(assigned & (nearest == k)) for k in range(len(intervals))]


class _LineFitter:
    """부재마다 다른 시드로 RANSAC 직선 추정"""

    def __init__(self, cfg: "PipelineConfig"):
        self.cfg = cfg
        self.counter = 0

    def fit(self, xyz: np.ndarray):
        self.counter += 1
        if len(xyz) < 2:
            return None, np.arange(len(xyz))
        line, inliers = ransac_line(
            xyz, self.cfg.ransac_distance, self.cfg.ransac_iterations,
            seed=[self.cfg.rng_seed, LINE_SEED_BASE + self.counter],
        )
        return line, inliers

    def fit_two(self, xyz: np.ndarray) -> tuple:
        """첫 직선을 찾고 inlier를 뺀 나머지에서 두 번째 직선"""
        first, inliers = self.fit(xyz)
        lines = [first] if first is not None else []
        rest = np.delete(xyz, inliers, axis=0)
        if len(rest) >= 2:
            second, _ = self.fit(rest)
            lines.append(second)
        return tuple(lines)


def _make_member(category, label, indices, xyz, lines, group=None) -> Member:
    means = xyz[indices].mean(axis=0)
    return Member(
        category=category,
        label=label,
        indices=np.sort(indices),
        mean_a1=float(means[0]),
        mean_a2=float(means[1]),
        mean_a3=float(means[2]),
        lines=tuple(lines),
        group=group,
    )


def _recognize_linear(
    category: MemberCategory,
    member_idx: np.ndarray,
    xyz: np.ndarray,
    peaks: PeakCount,
    fitter: _LineFitter,
    max_distance: float,
) -> tuple:
    """스터드/월레: 구간별 분할 후 정렬축 평균 오름차순 번호 (구간 하나당 부재 하나, 식별된 개수에서 끝남)"""
    column = category.ordering_axis.column
    parts = partition_by_intervals(xyz[member_idx, column], peaks.intervals, max_distance)

    found = []
    for k, part in enumerate(parts):
        if len(part) == 0:
            raise SegmentationError(
                f"{category.value} interval {k + 1} of {peaks.count} has no points"
            )
        indices = member_idx[part]
        line, _ = fitter.fit(xyz[indices])
        found.append((float(xyz[indices, column].mean()), indices, line))

    found.sort(key=lambda item: item[0])
    return tuple(
        _make_member(category, str(n), indices, xyz, [line] if line is not None else [])
        for n, (_, indices, line) in enumerate(found, start=1)
    )


def _tie_group(mean_a1: float, wale_ranges: list) -> int:
    """월레 1의 a1 범위 안이면 1, 아니면 가장 가까운 월레 번호"""
    lo, hi = wale_ranges[0]
    if lo <= mean_a1 <= hi:
        return 1
    gaps = [max(a - mean_a1, mean_a1 - b, 0.0) for a, b in wale_ranges]
    return int(np.argmin(gaps)) + 1


def recognize_members(
    cloud: PointCloud,
    stud_idx: np.ndarray,
    wale_idx: np.ndarray,
    clusters: Sequence[np.ndarray],
    categories: Sequence[MemberCategory],
    stud_peaks: PeakCount,
    wale_peaks: PeakCount,
    frame: Frame,
    axis3_sign: int,
    cfg: "PipelineConfig",
) -> MemberSet:
    """
    부재 인식 및 번호 부여

    - 스터드: 스터드 전면 점을 a2 구간으로 나누고 a2 평균 오름차순으로 "1", "2", ...
    - 월레: 같은 방식으로 a1 기준
    - 브레이스: 군집 전체 평균 a2 오름차순, 기둥별로 직선 두 개
    - 타이: 월레 1의 a1 범위 안이면 그룹 1, 아니면 가장 가까운 월레 그룹. 그룹 안에서 a2 오름차순 "g_k"

    Args:
        cloud: 변환된 클라우드
        stud_idx / wale_idx: 스터드/월레 전면 점 인덱스
        clusters: 타이/브레이스 군집 인덱스 목록
        categories: 군집별 분류 결과
        stud_peaks / wale_peaks: 개수 추정 결과
        frame: 변환 좌표계
        axis3_sign: 제3주축 방향
        cfg: 파이프라인 설정

    Returns:
        MemberSet
    """
    if len(clusters) != len(categories):
        raise SegmentationError("cluster and category counts differ")

    xyz = cloud.xyz
    fitter = _LineFitter(cfg)
    stud_idx = np.asarray(stud_idx, dtype=np.int64)
    wale_idx = np.asarray(wale_idx, dtype=np.int64)

    studs = _recognize_linear(
        MemberCategory.STUD, stud_idx, xyz, stud_peaks, fitter, cfg.member_bin_size,
    )
    wales = _recognize_linear(
        MemberCategory.WALE, wale_idx, xyz, wale_peaks, fitter, cfg.member_bin_size,
    )

    brace_items = []
    tie_items = []
    for indices, category in zip(clusters, categories):
        indices = np.asarray(indices, dtype=np.int64)
        if len(indices) == 0:
            raise SegmentationError("empty tie/brace cluster")
        means = xyz[indices].mean(axis=0)
        if category is MemberCategory.BRACE:
            brace_items.append((float(means[1]), indices))
        else:
            tie_items.append((float(means[0]), float(means[1]), indices))

    brace_items.sort(key=lambda item: item[0])
    braces = tuple(
        _make_member(MemberCategory.BRACE, str(n), indices, xyz, fitter.fit_two(xyz[indices]))
        for n, (_, indices) in enumerate(brace_items, start=1)
    )

    ties = []
    if tie_items:
        if not wales:
            raise SegmentationError("ties found but no wale to group them by")
        wale_ranges = [
            (float(xyz[w.indices, 0].min()), float(xyz[w.indices, 0].max())) for w in wales
        ]
        groups = {}
        for mean_a1, mean_a2, indices in tie_items:
            groups.setdefault(_tie_group(mean_a1, wale_ranges), []).append((mean_a2, indices))

        for g in range(1, len(wales) + 1):
            members = sorted(groups.get(g, []), key=lambda item: item[0])
            if not members:
                logger.warning(f"월레 {g}에 속한 타이가 없습니다.")
            for k, (_, indices) in enumerate(members, start=1):
                line, _ = fitter.fit(xyz[indices])
                ties.append(_make_member(
                    MemberCategory.TIE, f"{g}_{k}", indices, xyz,
                    [line] if line is not None else [], group=g,
                ))

    member_set = MemberSet(
        members={
            MemberCategory.STUD: studs,
            MemberCategory.WALE: wales,
            MemberCategory.TIE: tuple(ties),
            MemberCategory.BRACE: braces,
        },
        frame=frame,
        axis3_sign=axis3_sign,
    )
    counts = ", ".join(f"{c.value} {n}" for c, n in member_set.counts().items())
    logger.info(f"부재 인식 완료: {counts}")
    return member_set
