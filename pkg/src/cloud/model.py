"""포인트 클라우드 값 타입, AABB, 축 히스토그램, 피크 탐색

모든 모듈이 공유하는 기본 타입입니다. 좌표 단위는 미터입니다.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..errors import EmptyCloudError, ParameterError


class Point3(NamedTuple):
    """단일 점 (색상은 선택)"""
    x: float
    y: float
    z: float
    r: Optional[int] = None
    g: Optional[int] = None
    b: Optional[int] = None


class Axis(Enum):
    """히스토그램/정렬 축

    X/Y/Z는 원 좌표계, A1~A3는 PCA 변환 좌표계의 주축입니다.
    변환된 클라우드에서 A1~A3는 각각 0/1/2번 열에 해당합니다.
    """
    X = "x"
    Y = "y"
    Z = "z"
    A1 = "a1"
    A2 = "a2"
    A3 = "a3"

    @property
    def column(self) -> int:
        return {"x": 0, "y": 1, "z": 2, "a1": 0, "a2": 1, "a3": 2}[self.value]


IndexLike = Union[np.ndarray, Sequence[int]]


@dataclass(frozen=True, eq=False)
class PointCloud:
    """순서가 보존되는 3D 점 집합

    Args:
        xyz: (N, 3) float64 좌표 (미터)
        rgb: (N, 3) uint8 색상 또는 None
        warnings: 처리 중 기록된 경고 (예: 지면 제거로 모든 점이 사라짐)
    """

    xyz: np.ndarray
    rgb: Optional[np.ndarray] = None
    warnings: tuple = field(default=())

    def __post_init__(self):
        xyz = np.array(self.xyz, dtype=np.float64, copy=True).reshape(-1, 3)
        if not np.all(np.isfinite(xyz)):
            raise ParameterError("coordinates must be finite")
        xyz.setflags(write=False)
        object.__setattr__(self, "xyz", xyz)

        if self.rgb is not None:
            rgb = np.array(self.rgb, copy=True).reshape(-1, 3)
            if len(rgb) != len(xyz):
                raise ParameterError("rgb length must match xyz length")
            if rgb.size and (rgb.min() < 0 or rgb.max() > 255):
                raise ParameterError("color channels must be in [0, 255]")
            rgb = rgb.astype(np.uint8)
            rgb.setflags(write=False)
            object.__setattr__(self, "rgb", rgb)

        object.__setattr__(self, "warnings", tuple(self.warnings))

    @classmethod
    def empty(cls, with_color: bool = False) -> "PointCloud":
        rgb = np.zeros((0, 3), dtype=np.uint8) if with_color else None
        return cls(np.zeros((0, 3)), rgb)

    @classmethod
    def from_points(cls, points: Iterable[Point3]) -> "PointCloud":
        points = [Point3(*p) for p in points]
        xyz = np.array([[p.x, p.y, p.z] for p in points], dtype=np.float64).reshape(-1, 3)
        has_color = bool(points) and all(p.r is not None for p in points)
        rgb = np.array([[p.r, p.g, p.b] for p in points]) if has_color else None
        return cls(xyz, rgb)

    def __len__(self) -> int:
        return len(self.xyz)

    @property
    def has_color(self) -> bool:
        return self.rgb is not None

    def point(self, i: int) -> Point3:
        x, y, z = (float(v) for v in self.xyz[i])
        if self.rgb is None:
            return Point3(x, y, z)
        r, g, b = (int(v) for v in self.rgb[i])
        return Point3(x, y, z, r, g, b)

    def select(self, index: IndexLike) -> "PointCloud":
        """부분 집합 추출 (bool 마스크 또는 오름차순 인덱스, 입력 순서 유지)"""
        index = np.asarray(index)
        if index.dtype != bool:
            index = np.sort(index.astype(np.int64))
        rgb = None if self.rgb is None else self.rgb[index]
        return PointCloud(self.xyz[index], rgb)

    def with_warning(self, message: str) -> "PointCloud":
        return PointCloud(self.xyz, self.rgb, self.warnings + (message,))

    def with_color(self, rgb: np.ndarray) -> "PointCloud":
        return PointCloud(self.xyz, rgb, self.warnings)

    def coords(self, axis: Axis) -> np.ndarray:
        return self.xyz[:, axis.column]


@dataclass(frozen=True)
class Aabb:
    """축 정렬 경계 상자 (닫힌 구간)"""

    min: tuple
    max: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min)
        hi = tuple(float(v) for v in self.max)
        if len(lo) != 3 or len(hi) != 3:
            raise ParameterError("box bounds must have 3 components")
        if not all(np.isfinite(lo + hi)):
            raise ParameterError("box bounds must be finite")
        if any(a > b for a, b in zip(lo, hi)):
            raise ParameterError("box min must be <= max componentwise")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    def contains(self, xyz: np.ndarray) -> np.ndarray:
        xyz = np.asarray(xyz, dtype=np.float64).reshape(-1, 3)
        lo = np.asarray(self.min)
        hi = np.asarray(self.max)
        return np.all((xyz >= lo) & (xyz <= hi), axis=1)

    def to_dict(self) -> dict:
        return {"min": list(self.min), "max": list(self.max)}


@dataclass(frozen=True, eq=False)
class AxisHistogram:
    """한 축을 따라 점 개수를 센 히스토그램

    i번째 bin은 [origin + i*bin_size, origin + (i+1)*bin_size) 구간입니다.
    """

    axis: Axis
    bin_size: float
    origin: float
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def lower_edge(self, i: int) -> float:
        return self.origin + i * self.bin_size

    def upper_edge(self, i: int) -> float:
        return self.origin + (i + 1) * self.bin_size

    def bin_of(self, values: np.ndarray) -> np.ndarray:
        """좌표 -> bin 인덱스 (상단 경계의 점은 마지막 bin)"""
        idx = np.floor((np.asarray(values, dtype=np.float64) - self.origin) / self.bin_size)
        return np.clip(idx.astype(np.int64), 0, self.n_bins - 1)


def _require_non_empty(cloud: PointCloud) -> None:
    if len(cloud) == 0:
        raise EmptyCloudError()


def bounds(cloud: PointCloud) -> Aabb:
    """클라우드의 성분별 최소/최대로 이루어진 상자"""
    _require_non_empty(cloud)
    return Aabb(tuple(cloud.xyz.min(axis=0)), tuple(cloud.xyz.max(axis=0)))


def histogram_of(values: np.ndarray, bin_size: float, axis: Axis = Axis.Z) -> AxisHistogram:
    """1차원 좌표 배열의 히스토그램 (origin = 최솟값)"""
    if not bin_size > 0:
        raise ParameterError("bin_size must be > 0")
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyCloudError()

    origin = float(values.min())
    n_bins = int(np.floor((float(values.max()) - origin) / bin_size)) + 1
    idx = np.floor((values - origin) / bin_size).astype(np.int64)
    idx = np.clip(idx, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return AxisHistogram(axis=axis, bin_size=float(bin_size), origin=origin, counts=counts)


def axis_histogram(cloud: PointCloud, axis: Axis, bin_size: float) -> AxisHistogram:
    """클라우드를 축 방향으로 bin_size 간격으로 집계"""
    if not bin_size > 0:
        raise ParameterError("bin_size must be > 0")
    _require_non_empty(cloud)
    return histogram_of(cloud.coords(axis), bin_size, axis)


def highest_peak(hist: AxisHistogram) -> int:
    """최대 개수 bin의 인덱스 (동률이면 가장 낮은 인덱스)"""
    if hist.n_bins == 0:
        raise ParameterError("histogram has no bins")
    # np.argmax는 첫 번째 최댓값을 반환
    return int(np.argmax(hist.counts))


def baseline_runs(counts: np.ndarray, baseline: Optional[float] = None) -> list:
    """baseline을 초과했다가 다시 이하로 떨어지는 구간 목록

    Args:
        counts: bin별 개수
        baseline: 기준선. None이면 총 개수 / bin 수 (빈 bin 포함)

    Returns:
        [(start_bin, end_bin), ...] - end_bin 포함
    """
    counts = np.asarray(counts)
    if counts.size == 0:
        return []
    if baseline is None:
        baseline = counts.sum() / counts.size

    runs = []
    start = None
    for i, c in enumerate(counts):
        if c > baseline:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, counts.size - 1))
    return runs
