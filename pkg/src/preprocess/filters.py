"""전처리 필터 - 주변 제거, 지면 제거, 이상점 제거, 다운샘플링

모든 필터는 입력 순서를 유지하며 입력의 부분 집합(다운샘플링은 중심점)을 반환합니다.
"""

import logging
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from ..cloud import Aabb, Axis, PointCloud, axis_histogram, highest_peak
from ..errors import EmptyCloudError, InsufficientPointsError, ParameterError

logger = logging.getLogger(__name__)

KEEP_INSIDE = "inside"
KEEP_OUTSIDE = "outside"

# kNN 질의 한 번에 처리할 점 수
KNN_CHUNK = 50_000

GROUND_REMOVED_ALL = "ground removal removed all points"


def pass_through(cloud: PointCloud, box: Aabb, keep: str = KEEP_INSIDE) -> PointCloud:
    """
    상자 기준 통과 필터

    Args:
        cloud: 입력 클라우드
        box: 닫힌 AABB
        keep: "inside" (상자 안 유지) 또는 "outside" (상자 밖 유지)
    """
    if keep not in (KEEP_INSIDE, KEEP_OUTSIDE):
        raise ParameterError("keep must be 'inside' or 'outside'")

    mask = box.contains(cloud.xyz)
    if keep == KEEP_OUTSIDE:
        mask = ~mask

    result = cloud.select(mask)
    logger.info(f"통과 필터({keep}): {len(cloud)} -> {len(result)}")
    return result


def remove_ground(cloud: PointCloud, bin_size: float) -> PointCloud:
    """
    단일 피크 검출로 지면 제거

    Z 히스토그램의 최고 피크 bin을 지면으로 보고, 그 bin 상단 경계 이하의 점을 모두 제거합니다.
    모든 점이 제거되면 경고가 기록된 빈 클라우드를 반환합니다.
    """
    if not bin_size > 0:
        raise ParameterError("bin_size must be > 0")
    if len(cloud) == 0:
        raise EmptyCloudError()

    hist = axis_histogram(cloud, Axis.Z, bin_size)
    peak = highest_peak(hist)
    ground_level = hist.upper_edge(peak)

    result = cloud.select(cloud.xyz[:, 2] > ground_level)
    logger.info(f"지면 제거: 피크 bin {peak}, z <= {ground_level:.4f} 제거, {len(cloud)} -> {len(result)}")

    if len(result) == 0:
        logger.warning("지면 제거 후 남은 점이 없습니다.")
        return result.with_warning(GROUND_REMOVED_ALL)
    return result


def mean_knn_distances(xyz: np.ndarray, k: int) -> np.ndarray:
    """각 점에서 자기 자신을 제외한 k개 최근접 이웃까지의 평균 거리"""
    tree = cKDTree(xyz)
    result = np.empty(len(xyz), dtype=np.float64)
    for start in range(0, len(xyz), KNN_CHUNK):
        stop = min(start + KNN_CHUNK, len(xyz))
        dists, _ = tree.query(xyz[start:stop], k=k + 1)
        # 첫 열은 자기 자신 (거리 0)
        result[start:stop] = dists[:, 1:].mean(axis=1)
    return result


def statistical_outlier_removal(cloud: PointCloud, k: int, std_ratio: float) -> tuple:
    """
    통계적 이상점 제거 (단측)

    d_i = k-최근접 이웃 평균 거리, μ/σ = d의 평균/모표준편차일 때 d_i <= μ + std_ratio·σ 인 점만 유지합니다.

    Args:
        cloud: k보다 많은 점을 가진 클라우드
        k: 이웃 수 (>= 1)
        std_ratio: 표준편차 배수 (> 0)

    Returns:
        (kept, removed) - 둘 다 입력 순서 유지
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ParameterError("k must be >= 1")
    if not std_ratio > 0:
        raise ParameterError("std_ratio must be > 0")
    if len(cloud) <= k:
        raise InsufficientPointsError("k too large for cloud")

    d = mean_knn_distances(cloud.xyz, int(k))
    mu = d.mean()
    sigma = d.std()
    keep = d <= mu + std_ratio * sigma

    kept = cloud.select(keep)
    removed = cloud.select(~keep)
    logger.info(f"이상점 제거: k={k}, ratio={std_ratio}, 제거 {len(removed)}개 / {len(cloud)}개")
    return kept, removed


def centered_grid_anchor(cloud: PointCloud, voxel_size: float) -> np.ndarray:
    """
    경계 상자 중심이 복셀 경계에 오도록 맞춘 격자 기준점

    최소 모서리에서 한 복셀 이내 아래에 있으며, 축 방향 반사에 대해 복셀 분할이 대칭입니다.
    """
    if not voxel_size > 0:
        raise ParameterError("voxel_size must be > 0")
    if len(cloud) == 0:
        return np.zeros(3)

    lo = cloud.xyz.min(axis=0)
    hi = cloud.xyz.max(axis=0)
    center = (lo + hi) / 2
    steps = np.ceil(((hi - lo) / 2) / voxel_size)
    return center - steps * voxel_size


def voxel_downsample(
    cloud: PointCloud,
    voxel_size: float,
    anchor: Optional[np.ndarray] = None,
) -> PointCloud:
    """
    복셀 격자 다운샘플링

    Args:
        cloud: 입력 클라우드
        voxel_size: 정육면체 한 변 (m)
        anchor: 격자 기준점. None이면 클라우드 최소 모서리

    Returns:
        점유 복셀마다 중심점 하나, 입력에서 복셀이 처음 등장한 순서
    """
    if not voxel_size > 0:
        raise ParameterError("voxel_size must be > 0")
    if len(cloud) == 0:
        return cloud

    xyz = cloud.xyz
    origin = xyz.min(axis=0) if anchor is None else np.asarray(anchor, dtype=np.float64).reshape(3)
    keys = np.floor((xyz - origin) / voxel_size).astype(np.int64)

    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)

    # unique 순서 -> 첫 등장 순서로 재배열
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    slot = rank[inverse]

    counts = np.bincount(slot, minlength=len(order)).astype(np.float64)
    centroids = np.column_stack([
        np.bincount(slot, weights=xyz[:, c], minlength=len(order)) for c in range(3)
    ]) / counts[:, None]

    rgb = None
    if cloud.rgb is not None:
        sums = np.column_stack([
            np.bincount(slot, weights=cloud.rgb[:, c].astype(np.float64), minlength=len(order))
            for c in range(3)
        ])
        rgb = np.rint(sums / counts[:, None]).astype(np.uint8)

    result = PointCloud(centroids, rgb)
    logger.info(f"복셀 다운샘플링({voxel_size} m): {len(cloud)} -> {len(result)}")
    return result
