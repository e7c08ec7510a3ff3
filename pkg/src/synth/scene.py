"""합성 거푸집 장면 생성기 (정답 포함)

장면 좌표계: X = 벽 길이 방향(u), Y = 스캐너 쪽 깊이, Z = 위(v). 패널 전면은 Y = 0.
깊이 순서는 패널 -> 스터드 -> 월레 -> 타이/브레이스이며, 스캐너(+Y)에서 보이는 면만 샘플링합니다.
면은 스캐너 격자처럼 셀마다 점 하나를 두는 지터 격자로 샘플링합니다.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from ..cloud import Aabb, PointCloud
from ..errors import SceneSpecError
from ..ingest.config import load_structured
from ..ingest.references import ReferenceMeasurements
from ..members import CATEGORY_ORDER, MemberCategory, pair_label

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# 점 출처 코드
SOURCES = ("ground", "panel", "stud", "stud_side", "wale", "tie", "brace", "clutter", "outlier")

# 장면 치수 가정 (ground truth JSON에 함께 기록)
ASSUMPTIONS = {
    "stud_section_m": "0.10 x 0.05 (width x depth)",
    "wale_section_m": "0.10 x 0.10 (height x depth)",
    "tie": "hemisphere of tie_radius facing +Y, sampled at tie_density",
    "brace": "two half-pipe poles of brace_radius sharing one foot",
    "stud_sides": "both side faces at side_density_ratio x density",
    "sampling": "jittered grid, one point per cell",
    "visibility": "faces toward +Y only, no occlusion",
}


@dataclass(frozen=True)
class SceneSpec:
    """
    합성 장면 설명 (길이 단위: m)

    부재 개수: 스터드 stud_count, 월레 len(wale_elevations),
    타이 len(wale_elevations) x len(tie_columns), 브레이스 len(brace_positions).
    """

    case_label: str = "synthetic"
    # 스터드
    stud_count: int = 11
    stud_spacing: float = 0.3
    stud_width: float = 0.1
    stud_depth: float = 0.05
    stud_height: float = 3.0
    # 월레 (중심 높이)
    wale_elevations: tuple = (0.6, 2.2)
    wale_height: float = 0.1
    wale_depth: float = 0.1
    # 타이 (월레마다 한 행, 열 = 벽 길이 방향 위치)
    tie_columns: tuple = (0.15, 1.05, 1.95, 2.85)
    tie_radius: float = 0.03
    tie_offset: float = 0.02
    tie_density: float = 150000.0
    # 브레이스 (벽 길이 방향 위치마다 기둥 두 개)
    brace_positions: tuple = (0.6, 2.4)
    brace_radius: float = 0.03
    brace_reach: float = 1.2
    brace_foot_height: float = 0.1
    brace_top_heights: tuple = (1.2, 2.4)
    brace_top_gap: float = 0.03
    # 패널
    include_panel: bool = False
    panel_margin: float = 0.1
    # 샘플링 / 잡음
    density: float = 20000.0
    side_density_ratio: float = 0.1
    ground_density: float = 4000.0
    noise_sigma: float = 0.003
    outlier_fraction: float = 0.01
    jitter_sigma: float = 0.005
    # 지면 / 잡동사니
    include_ground: bool = True
    ground_margin: float = 0.3
    clutter: bool = False
    clutter_heights: tuple = (0.06, 0.085)
    # 자세
    yaw_deg: float = 0.0
    translation: tuple = (0.0, 0.0, 0.0)
    mirrored: bool = False
    seed: int = 0

    def __post_init__(self):
        if not _is_integer(self.stud_count) or self.stud_count < 1:
            raise SceneSpecError("stud_count", "stud_count must be an integer >= 1")

        for name in ("stud_spacing", "stud_width", "stud_depth", "stud_height", "wale_height",
                     "wale_depth", "tie_radius", "tie_offset", "tie_density", "brace_radius", "brace_reach",
                     "brace_top_gap", "density", "ground_density"):
            value = getattr(self, name)
            if not _is_number(value) or not value > 0:
                raise SceneSpecError(name, f"{name} must be > 0")

        for name in ("noise_sigma", "jitter_sigma", "panel_margin", "ground_margin", "brace_foot_height",
                     "side_density_ratio"):
            value = getattr(self, name)
            if not _is_number(value) or value < 0:
                raise SceneSpecError(name, f"{name} must be >= 0")

        if not _is_number(self.outlier_fraction) or not 0 <= self.outlier_fraction < 1:
            raise SceneSpecError("outlier_fraction", "outlier_fraction must be in [0, 1)")

        for name in ("wale_elevations", "tie_columns", "brace_positions", "brace_top_heights",
                     "clutter_heights", "translation"):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)) or not all(_is_number(v) for v in value):
                raise SceneSpecError(name, f"{name} must be a list of numbers")
            object.__setattr__(self, name, tuple(float(v) for v in value))

        if list(self.wale_elevations) != sorted(self.wale_elevations):
            raise SceneSpecError("wale_elevations", "wale_elevations must be ascending")
        if list(self.tie_columns) != sorted(self.tie_columns):
            raise SceneSpecError("tie_columns", "tie_columns must be ascending")
        if list(self.brace_positions) != sorted(self.brace_positions):
            raise SceneSpecError("brace_positions", "brace_positions must be ascending")
        if self.tie_columns and not self.wale_elevations:
            raise SceneSpecError("tie_columns", "ties need at least one wale row")
        if len(self.brace_top_heights) != 2:
            raise SceneSpecError("brace_top_heights", "brace_top_heights must have two values")
        if len(self.clutter_heights) != 2 or self.clutter_heights[0] > self.clutter_heights[1]:
            raise SceneSpecError("clutter_heights", "clutter_heights must be [low, high]")
        if len(self.translation) != 3:
            raise SceneSpecError("translation", "translation must have three values")
        if not _is_integer(self.seed) or self.seed < 0:
            raise SceneSpecError("seed", "seed must be an integer >= 0")

    @property
    def wale_count(self) -> int:
        return len(self.wale_elevations)

    @property
    def tie_count(self) -> int:
        return len(self.wale_elevations) * len(self.tie_columns)

    @property
    def brace_count(self) -> int:
        return len(self.brace_positions)

    @property
    def stud_front(self) -> float:
        return self.stud_depth

    @property
    def wale_front(self) -> float:
        return self.stud_depth + self.wale_depth

    @property
    def wall_span(self) -> tuple:
        """스터드 바깥 면 기준 벽 길이 범위 (u)"""
        last = (self.stud_count - 1) * self.stud_spacing
        return -self.stud_width, last + self.stud_width

    def to_dict(self) -> dict:
        return asdict(self)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_integer(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def scene_spec_from_dict(raw: dict) -> SceneSpec:
    """dict -> SceneSpec (알 수 없는 필드는 거부)"""
    if not isinstance(raw, dict):
        raise SceneSpecError("<root>", "scene spec must be an object")
    known = {f.name for f in fields(SceneSpec)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise SceneSpecError(unknown[0], f"unknown field: {unknown[0]}")
    return SceneSpec(**raw)


def read_scene_spec(path: PathLike) -> SceneSpec:
    """YAML/JSON 장면 설명 읽기"""
    try:
        raw = load_structured(path)
    except (ValueError, yaml.YAMLError) as e:
        raise SceneSpecError("<root>", f"scene spec parse error: {e}")
    return scene_spec_from_dict(raw)


@dataclass(frozen=True)
class GroundTruth:
    """
    생성 장면의 정답

    Args:
        positions: 카테고리 -> [(라벨, 정렬축 위치 m)] (라벨 순)
        pairs: 카테고리 -> [(쌍 라벨, 간격 mm)]
        sources: 점별 출처 코드 (SOURCES 인덱스, 메모리 전용)
    """

    case_label: str
    positions: dict
    pairs: dict
    sources: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def counts(self) -> dict:
        return {c: len(self.positions.get(c, [])) for c in CATEGORY_ORDER}

    def source_mask(self, name: str) -> np.ndarray:
        return self.sources == SOURCES.index(name)

    def to_dict(self) -> dict:
        return {
            "case": self.case_label,
            "categories": {
                c.value: {
                    "count": len(self.positions.get(c, [])),
                    "members": [{"label": label, "position_m": pos} for label, pos in self.positions.get(c, [])],
                }
                for c in CATEGORY_ORDER
            },
            "pairs": {
                c.value: [{"label": label, "spacing_mm": value} for label, value in self.pairs.get(c, [])]
                for c in CATEGORY_ORDER
                if self.pairs.get(c)
            },
            "assumptions": ASSUMPTIONS,
        }


def write_ground_truth(gt: GroundTruth, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(gt.to_dict(), f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def ground_truth_references(gt: GroundTruth) -> ReferenceMeasurements:
    """정답 간격을 파이프라인 라벨 규칙 그대로 기준값으로 변환"""
    return ReferenceMeasurements({c: dict(pairs) for c, pairs in gt.pairs.items() if pairs})


class _Sampler:
    """면 샘플링 누적기 - 점과 출처 코드를 함께 모음"""

    def __init__(self, rng: np.random.Generator, density: float):
        self.rng = rng
        self.density = density
        self.chunks = []
        self.codes = []

    def grid(self, a: float, b: float, density: Optional[float] = None) -> tuple:
        """[0, a] x [0, b] 지터 격자 - 셀마다 균일 난수 점 하나"""
        step = 1.0 / np.sqrt(density or self.density)
        na = max(1, int(round(a / step)))
        nb = max(1, int(round(b / step)))
        ia, ib = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
        s = (ia.ravel() + self.rng.uniform(0.0, 1.0, ia.size)) * (a / na)
        t = (ib.ravel() + self.rng.uniform(0.0, 1.0, ib.size)) * (b / nb)
        return s, t

    def add(self, xyz: np.ndarray, source: str) -> None:
        self.chunks.append(xyz)
        self.codes.append(np.full(len(xyz), SOURCES.index(source), dtype=np.int8))

    def front_rect(self, u0, u1, v0, v1, y, source, density=None) -> None:
        """Y = y 평면의 직사각형 [u0,u1] x [v0,v1]"""
        s, t = self.grid(u1 - u0, v1 - v0, density)
        self.add(np.column_stack([u0 + s, np.full(len(s), y), v0 + t]), source)

    def side_rect(self, u, y0, y1, v0, v1, source, density=None) -> None:
        """X = u 평면의 직사각형 [y0,y1] x [v0,v1]"""
        s, t = self.grid(y1 - y0, v1 - v0, density)
        self.add(np.column_stack([np.full(len(s), u), y0 + s, v0 + t]), source)

    def horizontal_rect(self, u0, u1, y0, y1, z, source, density=None) -> None:
        """Z = z 평면의 직사각형 (지면)"""
        s, t = self.grid(u1 - u0, y1 - y0, density)
        self.add(np.column_stack([u0 + s, y0 + t, np.full(len(s), z)]), source)

    def half_pipe(self, start, end, radius, source) -> None:
        """
        start -> end 축의 원통 중 +Y를 향한 반원통

        축은 u = 일정한 평면 안에 있어야 합니다 (브레이스 기둥).
        """
        start = np.asarray(start, dtype=np.float64)
        axis = np.asarray(end, dtype=np.float64) - start
        length = float(np.linalg.norm(axis))
        axis /= length
        across = np.array([1.0, 0.0, 0.0])
        normal = np.cross(axis, across)
        normal /= np.linalg.norm(normal)
        if normal[1] < 0:
            normal = -normal

        arc, t = self.grid(np.pi * radius, length)
        theta = arc / radius
        xyz = (
            start
            + np.outer(t, axis)
            + radius * (np.outer(np.cos(theta), across) + np.outer(np.sin(theta), normal))
        )
        self.add(xyz, source)

    def hemisphere(self, center, radius, source, density) -> None:
        """+Y를 향한 반구면 (높이-방위각 등면적 격자)"""
        h, arc = self.grid(radius, 2.0 * np.pi * radius, density)
        rho = np.sqrt(np.maximum(radius ** 2 - h ** 2, 0.0))
        phi = arc / radius
        offset = np.column_stack([rho * np.cos(phi), h, rho * np.sin(phi)])
        self.add(np.asarray(center, dtype=np.float64) + offset, source)

    def result(self) -> tuple:
        if not self.chunks:
            return np.zeros((0, 3)), np.zeros(0, dtype=np.int8)
        return np.vstack(self.chunks), np.concatenate(self.codes)


def _pose_matrix(spec: SceneSpec) -> np.ndarray:
    yaw = np.radians(spec.yaw_deg)
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def apply_pose(xyz: np.ndarray, spec: SceneSpec) -> np.ndarray:
    """거울 반사(Y -> -Y) 후 Z축 회전 + 평행 이동"""
    xyz = np.array(xyz, dtype=np.float64, copy=True).reshape(-1, 3)
    if spec.mirrored:
        xyz[:, 1] = -xyz[:, 1]
    return xyz @ _pose_matrix(spec).T + np.asarray(spec.translation)


def _member_layout(spec: SceneSpec, rng: np.random.Generator) -> dict:
    """흔들림(jitter)을 적용한 부재 위치"""
    j = spec.jitter_sigma

    def jitter(n):
        return rng.normal(0.0, j, n) if j > 0 else np.zeros(n)

    studs = np.arange(spec.stud_count) * spec.stud_spacing + jitter(spec.stud_count)
    wales = np.asarray(spec.wale_elevations) + jitter(spec.wale_count)
    ties = [np.asarray(spec.tie_columns) + jitter(len(spec.tie_columns)) for _ in spec.wale_elevations]
    braces = np.asarray(spec.brace_positions) + jitter(spec.brace_count)
    return {"stud": studs, "wale": wales, "tie": ties, "brace": braces}


def _truth(layout: dict) -> tuple:
    """부재 위치와 인접 쌍 간격 (라벨은 파이프라인 번호 규칙과 동일)"""

    def numbered(values):
        return [(str(i + 1), float(x)) for i, x in enumerate(values)]

    def chain(category, items):
        return [
            (pair_label(category, a[0], b[0]), (b[1] - a[1]) * 1000.0)
            for a, b in zip(items, items[1:])
        ]

    tie_rows = [
        [(f"{g}_{k}", float(u)) for k, u in enumerate(row, start=1)]
        for g, row in enumerate(layout["tie"], start=1)
    ]
    positions = {
        MemberCategory.STUD: numbered(layout["stud"]),
        MemberCategory.WALE: numbered(layout["wale"]),
        MemberCategory.TIE: [t for row in tie_rows for t in row],
        MemberCategory.BRACE: numbered(layout["brace"]),
    }
    pairs = {
        MemberCategory.STUD: chain(MemberCategory.STUD, positions[MemberCategory.STUD]),
        MemberCategory.WALE: chain(MemberCategory.WALE, positions[MemberCategory.WALE]),
        MemberCategory.TIE: [p for row in tie_rows for p in chain(MemberCategory.TIE, row)],
        MemberCategory.BRACE: chain(MemberCategory.BRACE, positions[MemberCategory.BRACE]),
    }
    return positions, pairs


def generate_scene(spec: SceneSpec) -> tuple:
    """
    합성 장면 생성

    Args:
        spec: 장면 설명

    Returns:
        (PointCloud, GroundTruth) - 같은 spec(seed 포함)이면 비트 단위로 동일
    """
    rng = np.random.default_rng(spec.seed)
    layout = _member_layout(spec, rng)
    sampler = _Sampler(rng, spec.density)

    u_lo, u_hi = spec.wall_span
    half_w = spec.stud_width / 2

    if spec.include_panel:
        # 스터드 사이로 보이는 패널 면
        edges = [u_lo - spec.panel_margin]
        for u in np.sort(layout["stud"]):
            edges += [u - half_w, u + half_w]
        edges.append(u_hi + spec.panel_margin)
        for a, b in zip(edges[0::2], edges[1::2]):
            if b > a:
                sampler.front_rect(a, b, 0.0, spec.stud_height, 0.0, "panel")

    for u in layout["stud"]:
        sampler.front_rect(u - half_w, u + half_w, 0.0, spec.stud_height, spec.stud_front, "stud")

    if spec.side_density_ratio > 0:
        side_density = spec.density * spec.side_density_ratio
        for u in layout["stud"]:
            for side in (u - half_w, u + half_w):
                sampler.side_rect(side, 0.0, spec.stud_depth, 0.0, spec.stud_height, "stud_side", side_density)

    half_h = spec.wale_height / 2
    for v in layout["wale"]:
        sampler.front_rect(u_lo, u_hi, v - half_h, v + half_h, spec.wale_front, "wale")

    tie_y = spec.wale_front + spec.tie_offset
    for v, row in zip(layout["wale"], layout["tie"]):
        for u in row:
            sampler.hemisphere((u, tie_y, v), spec.tie_radius, "tie", spec.tie_density)

    foot_y = spec.wale_front + spec.brace_reach
    top_y = spec.wale_front + spec.brace_top_gap
    for u in layout["brace"]:
        foot = (u, foot_y, spec.brace_foot_height)
        for top_z in spec.brace_top_heights:
            sampler.half_pipe(foot, (u, top_y, top_z), spec.brace_radius, "brace")

    if spec.include_ground:
        sampler.horizontal_rect(
            u_lo - spec.ground_margin, u_hi + spec.ground_margin,
            -0.1, foot_y + 0.4, 0.0, "ground", density=spec.ground_density,
        )
    if spec.clutter:
        z0, z1 = spec.clutter_heights
        n = int(round(spec.ground_density * 0.3))
        u = rng.uniform(u_lo, u_hi, n)
        y = rng.uniform(spec.wale_front + 0.3, spec.wale_front + 0.9, n)
        z = rng.uniform(z0, z1, n)
        sampler.add(np.column_stack([u, y, z]), "clutter")

    xyz, codes = sampler.result()
    if len(xyz) == 0:
        raise SceneSpecError("density", "scene produced no points")

    if spec.noise_sigma > 0:
        xyz = xyz + rng.normal(0.0, spec.noise_sigma, xyz.shape)

    n_outliers = int(round(spec.outlier_fraction * len(xyz)))
    if n_outliers > 0:
        lo, hi = xyz.min(axis=0), xyz.max(axis=0)
        pad = 0.1 * (hi - lo)
        outliers = rng.uniform(lo - pad, hi + pad, (n_outliers, 3))
        xyz = np.vstack([xyz, outliers])
        codes = np.concatenate([codes, np.full(n_outliers, SOURCES.index("outlier"), dtype=np.int8)])

    xyz = apply_pose(xyz, spec)
    positions, pairs = _truth(layout)
    gt = GroundTruth(case_label=spec.case_label, positions=positions, pairs=pairs, sources=codes)

    logger.info(
        f"합성 장면 생성: {len(xyz)}개 점 (스터드 {spec.stud_count}, 월레 {spec.wale_count}, "
        f"타이 {spec.tie_count}, 브레이스 {spec.brace_count}, seed {spec.seed})"
    )
    return PointCloud(xyz), gt


def suggested_crop_box(spec: SceneSpec, margin: float = 0.15) -> Aabb:
    """
    부재 영역을 감싸는 자세 적용 AABB

    패널(Y = 0)은 제외하고, Z 하한은 지면 바로 아래(-0.025 m)입니다.
    """
    u_lo, u_hi = spec.wall_span
    y_lo = spec.stud_front / 2
    y_hi = spec.wale_front + spec.brace_reach + margin
    z_lo = -0.025
    z_hi = max([spec.stud_height] + list(spec.brace_top_heights)) + margin

    corners = np.array([
        [u, y, z]
        for u in (u_lo - margin, u_hi + margin)
        for y in (y_lo, y_hi)
        for z in (z_lo, z_hi)
    ])
    posed = apply_pose(corners, spec)
    return Aabb(tuple(posed.min(axis=0)), tuple(posed.max(axis=0)))


def with_seed(spec: SceneSpec, seed: int) -> SceneSpec:
    return replace(spec, seed=seed)
