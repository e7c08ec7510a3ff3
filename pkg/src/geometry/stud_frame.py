"""스터드 전면 검출 및 변환 좌표계 결정"""

import logging
from typing import TYPE_CHECKING

import numpy as np

from ..cloud import PointCloud
from ..errors import FitFailure
from .frame import pca_frame
from .ransac import ransac_line, ransac_plane

if TYPE_CHECKING:
    from ..ingest.config import PipelineConfig

logger = logging.getLogger(__name__)


def _grow_lateral(lateral: np.ndarray, seed_mask: np.ndarray, max_gap: float) -> np.ndarray:
    """seed 중앙값 위치에서 시작해 간격이 max_gap 이하인 동안 좌우로 확장"""
    order = np.argsort(lateral, kind="stable")
    s = lateral[order]
    seed_pos = np.flatnonzero(seed_mask[order])
    lo = hi = int(seed_pos[len(seed_pos) // 2])

    while lo > 0 and s[lo] - s[lo - 1] <= max_gap:
        lo -= 1
    while hi < len(s) - 1 and s[hi + 1] - s[hi] <= max_gap:
        hi += 1

    mask = np.zeros(len(lateral), dtype=bool)
    mask[order[lo:hi + 1]] = True
    return mask


def detect_stud_frame(cloud: PointCloud, cfg: "PipelineConfig") -> tuple:
    """
    스터드 전면 기준 좌표계 결정

    1. RANSAC 평면: 점이 가장 많은 평면 = 전체 스터드 전면
    2. 평면 inlier 안에서 RANSAC 직선으로 스터드 하나의 축을 찾음
    3. 직선 inlier에서 평면 내 측면 방향으로 dbscan_eps 이하 간격을 따라 확장 = 단일 스터드 전면
    4. 단일 스터드 전면에 PCA

    Args:
        cloud: 전처리된 클라우드
        cfg: 파이프라인 설정

    Returns:
        (Frame, 전체 스터드 평면 inlier 인덱스)
    """
    xyz = cloud.xyz
    if len(xyz) < 3:
        raise FitFailure("no stud plane found")

    try:
        plane, plane_idx = ransac_plane(
            xyz, cfg.ransac_distance, cfg.ransac_iterations,
            seed=[cfg.rng_seed, 1], samples=cfg.ransac_samples,
        )
    except FitFailure as e:
        raise FitFailure(f"no stud plane found: {e}")

    plane_pts = xyz[plane_idx]
    if len(plane_pts) < 3:
        raise FitFailure("no stud plane found")
    logger.info(f"스터드 전면 평면: inlier {len(plane_idx)}개")

    line, line_local = ransac_line(
        plane_pts, cfg.ransac_distance, cfg.ransac_iterations, seed=[cfg.rng_seed, 2],
    )

    lateral_dir = np.cross(plane.n, line.u)
    lateral_dir /= np.linalg.norm(lateral_dir)
    lateral = (plane_pts - line.o) @ lateral_dir

    seed_mask = np.zeros(len(plane_pts), dtype=bool)
    seed_mask[line_local] = True
    single = _grow_lateral(lateral, seed_mask, cfg.dbscan_eps)
    logger.info(f"단일 스터드 전면: {int(single.sum())}개 점")

    frame = pca_frame(plane_pts[single])
    return frame, plane_idx
