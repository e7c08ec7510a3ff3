"""RANSAC 평면/직선 검출

시드가 같으면 결과가 비트 단위로 동일합니다. 퇴화 샘플(동일 직선 위의 3점,
일치하는 2점)은 반복 횟수에 포함하지 않고 다시 뽑습니다.
"""

import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..cloud import PointCloud
from ..errors import FitFailure, ParameterError
from .frame import LineModel, PlaneModel, as_xyz

logger = logging.getLogger(__name__)

Seed = Union[int, Sequence[int]]
IterationHook = Callable[[int, object, int], None]

# 연속 퇴화 샘플 허용 한도 (iterations 배수)
MAX_DRAW_FACTOR = 100
DEGENERATE_TOL = 1e-10


def _check_args(n_points: int, minimum: int, threshold: float, iterations: int) -> None:
    if not threshold > 0:
        raise ParameterError("distance_threshold must be > 0")
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")
    if n_points < minimum:
        raise FitFailure(f"need at least {minimum} points, got {n_points}")


def _plane_through(sample: np.ndarray) -> Optional[PlaneModel]:
    """샘플 점을 지나는 평면 (퇴화면 None)"""
    if len(sample) == 3:
        e1 = sample[1] - sample[0]
        e2 = sample[2] - sample[0]
        normal = np.cross(e1, e2)
        scale = np.linalg.norm(e1) * np.linalg.norm(e2)
        if not scale > 0 or np.linalg.norm(normal) <= DEGENERATE_TOL * scale:
            return None
        normal = normal / np.linalg.norm(normal)
        return PlaneModel(normal, -float(normal @ sample[0]))
    return _fit_plane_lsq(sample)


def _fit_plane_lsq(xyz: np.ndarray) -> Optional[PlaneModel]:
    """최소제곱 평면 (SVD 최소 특이벡터)"""
    centroid = xyz.mean(axis=0)
    _, s, vt = np.linalg.svd(xyz - centroid, full_matrices=False)
    if len(s) < 2 or not s[0] > 0 or s[1] <= DEGENERATE_TOL * s[0]:
        return None
    normal = vt[-1] if len(s) == 3 else np.cross(vt[0], vt[1])
    return PlaneModel(normal, -float(normal @ centroid))


def _fit_line_lsq(xyz: np.ndarray) -> Optional[LineModel]:
    """최소제곱 직선 (중심점 + 주방향)"""
    centroid = xyz.mean(axis=0)
    _, s, vt = np.linalg.svd(xyz - centroid, full_matrices=False)
    if not s[0] > 0:
        return None
    u = vt[0]
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0:
        u = -u
    return LineModel(centroid, u)


def _line_through(sample: np.ndarray) -> Optional[LineModel]:
    direction = sample[1] - sample[0]
    if np.linalg.norm(direction) <= DEGENERATE_TOL:
        return None
    return LineModel(sample[0], direction)


def _consensus(
    xyz: np.ndarray,
    k: int,
    make_model: Callable[[np.ndarray], Optional[object]],
    threshold: float,
    iterations: int,
    seed: Seed,
    on_iteration: Optional[IterationHook],
) -> tuple:
    """공통 RANSAC 루프 - 최다 inlier 모델 (동률이면 먼저 뽑힌 모델)"""
    rng = np.random.default_rng(seed)
    n = len(xyz)

    best_model = None
    best_mask = None
    best_count = -1
    done = 0
    draws = 0

    while done < iterations and draws < MAX_DRAW_FACTOR * iterations:
        draws += 1
        sample = xyz[rng.choice(n, size=k, replace=False)]
        model = make_model(sample)
        if model is None:
            continue

        mask = model.distance(xyz) <= threshold
        count = int(mask.sum())
        if on_iteration is not None:
            on_iteration(done, model, count)
        if count > best_count:
            best_model, best_mask, best_count = model, mask, count
        done += 1

    if best_model is None:
        raise FitFailure("all sampled point sets were degenerate")
    return best_model, best_mask


def ransac_plane(
    points: Union[PointCloud, np.ndarray],
    distance_threshold: float,
    iterations: int,
    seed: Seed,
    samples: int = 3,
    on_iteration: Optional[IterationHook] = None,
) -> tuple:
    """
    RANSAC 평면 검출

    Args:
        points: 3개 이상의 점
        distance_threshold: inlier 판정 수직 거리 (m)
        iterations: 유효 샘플 수
        seed: 난수 시드 (정수 또는 정수 시퀀스)
        samples: 반복당 샘플 점 수 (>= 3)
        on_iteration: (iteration, 후보 모델, inlier 수) 콜백

    Returns:
        (최소제곱 재추정 PlaneModel, 합의 inlier 인덱스 오름차순)
    """
    xyz = as_xyz(points)
    if samples < 3:
        raise ParameterError("ransac_samples must be >= 3 for planes")
    _check_args(len(xyz), samples, distance_threshold, iterations)

    if _fit_plane_lsq(xyz) is None:
        raise FitFailure("points are collinear")

    model, mask = _consensus(
        xyz, samples, _plane_through, distance_threshold, iterations, seed, on_iteration,
    )
    refit = _fit_plane_lsq(xyz[mask]) or model
    inliers = np.flatnonzero(mask)
    logger.debug(f"RANSAC 평면: inlier {len(inliers)}/{len(xyz)}")
    return refit, inliers


def ransac_line(
    points: Union[PointCloud, np.ndarray],
    distance_threshold: float,
    iterations: int,
    seed: Seed,
    on_iteration: Optional[IterationHook] = None,
) -> tuple:
    """
    RANSAC 직선 검출 (2점 샘플, 점-직선 거리)

    Returns:
        (최소제곱 재추정 LineModel, 합의 inlier 인덱스 오름차순)
    """
    xyz = as_xyz(points)
    _check_args(len(xyz), 2, distance_threshold, iterations)

    if _fit_line_lsq(xyz) is None:
        raise FitFailure("all points coincide")

    model, mask = _consensus(
        xyz, 2, _line_through, distance_threshold, iterations, seed, on_iteration,
    )
    refit = _fit_line_lsq(xyz[mask]) or model
    inliers = np.flatnonzero(mask)
    logger.debug(f"RANSAC 직선: inlier {len(inliers)}/{len(xyz)}")
    return refit, inliers
