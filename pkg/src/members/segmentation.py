"""월레 평면 분할, 제3주축 방향 판별, 타이/브레이스 밀도 군집화"""

import logging
from typing import TYPE_CHECKING, Optional, Union

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from ..cloud import PointCloud
from ..errors import AmbiguousDirectionError, FitFailure, ParameterError
from ..geometry import Frame, ransac_plane
from ..geometry.frame import as_xyz

if TYPE_CHECKING:
    from ..ingest.config import PipelineConfig

logger = logging.getLogger(__name__)

DIRECTION_TOL = 1e-6


def segment_wales(cloud_minus_studs: Union[PointCloud, np.ndarray], cfg: "PipelineConfig") -> tuple:
    """
    스터드 전면을 제거한 변환 클라우드에서 월레 전면 평면 검출

    inlier가 dbscan_min_points 미만이면 월레가 없는 것으로 봅니다.

    Returns:
        (월레 inlier 인덱스, 나머지 인덱스) - 입력 기준, 오름차순
    """
    xyz = as_xyz(cloud_minus_studs)
    try:
        _, wale_idx = ransac_plane(
            xyz, cfg.ransac_distance, cfg.ransac_iterations,
            seed=[cfg.rng_seed, 3], samples=cfg.ransac_samples,
        )
    except FitFailure:
        raise FitFailure("no wale plane found")

    if len(wale_idx) < cfg.dbscan_min_points:
        raise FitFailure("no wale plane found")

    mask = np.zeros(len(xyz), dtype=bool)
    mask[wale_idx] = True
    remainder_idx = np.flatnonzero(~mask)
    logger.info(f"월레 전면: inlier {len(wale_idx)}개, 나머지 {len(remainder_idx)}개")
    return wale_idx, remainder_idx


def identify_axis3_direction(
    stud_points: Union[PointCloud, np.ndarray],
    wale_points: Union[PointCloud, np.ndarray],
    frame: Optional[Frame] = None,
) -> int:
    """
    스터드/월레 전면의 a3 평균을 비교해 부재 설치 방향 판별

    Args:
        stud_points: 스터드 전면 점
        wale_points: 월레 전면 점
        frame: 주어지면 점을 월드 좌표로 보고 frame으로 투영, 없으면 변환 좌표(열 2 = a3)

    Returns:
        +1 (스터드 평균 < 월레 평균, 양의 방향) 또는 -1
    """
    stud_xyz = as_xyz(stud_points)
    wale_xyz = as_xyz(wale_points)
    if len(stud_xyz) == 0 or len(wale_xyz) == 0:
        raise ParameterError("stud and wale point sets must be non-empty")

    if frame is not None:
        stud_xyz = frame.project(stud_xyz)
        wale_xyz = frame.project(wale_xyz)

    stud_mean = float(stud_xyz[:, 2].mean())
    wale_mean = float(wale_xyz[:, 2].mean())
    if abs(stud_mean - wale_mean) <= DIRECTION_TOL:
        raise AmbiguousDirectionError("stud and wale surfaces share the same a3 mean")

    sign = 1 if stud_mean < wale_mean else -1
    logger.info(f"제3주축 방향: {sign:+d} (스터드 {stud_mean:.4f}, 월레 {wale_mean:.4f})")
    return sign


def isolate_beyond_wales(
    points: Union[PointCloud, np.ndarray],
    wale_a3: float,
    axis3_sign: int,
    margin: float,
) -> np.ndarray:
    """sign·(a3 - 월레 a3 평균) > margin 인 점의 인덱스 (타이/브레이스 후보)"""
    xyz = as_xyz(points)
    offset = axis3_sign * (xyz[:, 2] - wale_a3)
    return np.flatnonzero(offset > margin)


def _build_core_graph(core_xyz: np.ndarray, core_index: np.ndarray, eps: float) -> nx.Graph:
    """
    코어 점 연결 그래프

    - 노드: 코어 점 (원본 인덱스)
    - 엣지: 거리 eps 이하인 코어 점 쌍
    """
    G = nx.Graph()
    G.add_nodes_from(core_index.tolist())

    if len(core_xyz) > 1:
        pairs = cKDTree(core_xyz).query_pairs(eps, output_type="ndarray")
        G.add_edges_from(zip(core_index[pairs[:, 0]].tolist(), core_index[pairs[:, 1]].tolist()))
    return G


def cluster_ties_braces(
    remainder: Union[PointCloud, np.ndarray],
    eps: float,
    min_points: int,
    axis3_sign: Optional[int] = None,
    wale_a3: Optional[float] = None,
    margin: float = 0.0,
) -> list:
    """
    DBSCAN 밀도 군집화

    코어 점 = eps 이내 이웃(자기 포함)이 min_points 이상인 점.
    연결된 코어 점이 하나의 군집이고, 경계 점은 가장 낮은 인덱스의 코어 이웃이 속한 군집에 들어갑니다.
    axis3_sign과 wale_a3가 주어지면 월레 너머의 점만 먼저 남깁니다.

    Args:
        remainder: 변환 클라우드의 나머지 점
        eps: 이웃 반경 (m)
        min_points: 코어 판정 최소 이웃 수
        axis3_sign: 제3주축 방향 (+1/-1)
        wale_a3: 월레 전면의 a3 평균
        margin: 월레 평면과의 최소 거리

    Returns:
        군집별 오름차순 인덱스 배열 목록 (최소 인덱스 순), 잡음 점은 제외
    """
    if not eps > 0:
        raise ParameterError("eps must be > 0")
    if min_points < 1:
        raise ParameterError("min_points must be >= 1")

    xyz = as_xyz(remainder)
    candidates = np.arange(len(xyz))
    if axis3_sign is not None and wale_a3 is not None:
        candidates = isolate_beyond_wales(xyz, wale_a3, axis3_sign, margin)
    if len(candidates) == 0:
        return []

    pts = xyz[candidates]
    tree = cKDTree(pts)
    neighbor_counts = tree.query_ball_point(pts, eps, return_length=True)
    is_core = neighbor_counts >= min_points
    core_local = np.flatnonzero(is_core)
    if len(core_local) == 0:
        logger.info(f"군집 없음: 후보 {len(pts)}개 모두 잡음")
        return []

    graph = _build_core_graph(pts[core_local], core_local, eps)
    label = np.full(len(pts), -1, dtype=np.int64)
    components = sorted((min(c), sorted(c)) for c in nx.connected_components(graph))
    for cluster_id, (_, nodes) in enumerate(components):
        label[nodes] = cluster_id

    border_local = np.flatnonzero(~is_core)
    if len(border_local) > 0:
        core_tree = cKDTree(pts[core_local])
        for i, hits in zip(border_local, core_tree.query_ball_point(pts[border_local], eps)):
            if hits:
                label[i] = label[core_local[min(hits)]]

    clusters = [candidates[np.flatnonzero(label == c)] for c in range(len(components))]
    # 경계 점이 합류해도 군집 순서는 최소 인덱스 기준
    clusters.sort(key=lambda idx: int(idx[0]))
    logger.info(f"타이/브레이스 군집: {len(clusters)}개 (후보 {len(pts)}개)")
    return clusters
