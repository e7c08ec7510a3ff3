"""평면/직선 모델, PCA 좌표계, 좌표 변환"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..cloud import PointCloud
from ..errors import DegenerateGeometryError

UNIT_TOL = 1e-9
EIGEN_RATIO_MIN = 1e-12


def as_xyz(points: Union[PointCloud, np.ndarray]) -> np.ndarray:
    """PointCloud 또는 (N, 3) 배열을 float64 배열로"""
    if isinstance(points, PointCloud):
        return points.xyz
    return np.asarray(points, dtype=np.float64).reshape(-1, 3)


def _unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(3)
    norm = np.linalg.norm(v)
    if not norm > 0:
        raise DegenerateGeometryError(f"{name} must be non-zero")
    return v / norm


@dataclass(frozen=True, eq=False)
class PlaneModel:
    """{p : n·p + d = 0}, |n| = 1"""

    n: np.ndarray
    d: float

    def __post_init__(self):
        object.__setattr__(self, "n", _unit(self.n, "plane normal"))
        object.__setattr__(self, "d", float(self.d))

    def distance(self, xyz: np.ndarray) -> np.ndarray:
        return np.abs(as_xyz(xyz) @ self.n + self.d)


@dataclass(frozen=True, eq=False)
class LineModel:
    """{o + t·u}, |u| = 1"""

    o: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "o", np.asarray(self.o, dtype=np.float64).reshape(3))
        object.__setattr__(self, "u", _unit(self.u, "line direction"))

    def distance(self, xyz: np.ndarray) -> np.ndarray:
        rel = as_xyz(xyz) - self.o
        along = rel @ self.u
        return np.linalg.norm(rel - np.outer(along, self.u), axis=1)

    def to_dict(self) -> dict:
        return {"origin": self.o.tolist(), "direction": self.u.tolist()}


@dataclass(frozen=True, eq=False)
class Frame:
    """직교 정규 오른손 좌표계 (origin + a1/a2/a3)"""

    origin: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64).reshape(3))
        for name in ("a1", "a2", "a3"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64).reshape(3))

        axes = self.matrix
        if not np.allclose(axes @ axes.T, np.eye(3), atol=UNIT_TOL):
            raise DegenerateGeometryError("frame axes must be orthonormal")
        if not np.allclose(np.cross(self.a1, self.a2), self.a3, atol=UNIT_TOL):
            raise DegenerateGeometryError("frame must be right-handed")

    @classmethod
    def identity(cls) -> "Frame":
        return cls(np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))

    @property
    def matrix(self) -> np.ndarray:
        """행 = a1, a2, a3"""
        return np.vstack([self.a1, self.a2, self.a3])

    def project(self, xyz: np.ndarray) -> np.ndarray:
        return (as_xyz(xyz) - self.origin) @ self.matrix.T

    def to_dict(self) -> dict:
        return {
            "origin": self.origin.tolist(),
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
            "a3": self.a3.tolist(),
        }


def _orient_a1(a1: np.ndarray) -> np.ndarray:
    # a1·Z >= 0, Z 성분이 0이면 a1·X >= 0
    if abs(a1[2]) > UNIT_TOL:
        return a1 if a1[2] > 0 else -a1
    return a1 if a1[0] >= 0 else -a1


def _orient_a2(a2: np.ndarray) -> np.ndarray:
    # 절댓값이 가장 큰 성분을 양수로 (동률이면 낮은 인덱스)
    k = int(np.argmax(np.abs(a2)))
    return a2 if a2[k] >= 0 else -a2


def pca_frame(points: Union[PointCloud, np.ndarray]) -> Frame:
    """
    PCA로 좌표계 생성

    공분산 고유벡터를 고유값 내림차순으로 a1/a2/a3에 배정합니다.
    부호 규칙: a1·Z >= 0 (동률이면 a1·X >= 0), a2는 최대 성분이 양수, a3 = a1 × a2.

    Args:
        points: 동일 직선 위에 있지 않은 3개 이상의 점

    Returns:
        Frame (origin = 중심점)
    """
    xyz = as_xyz(points)
    if len(xyz) < 3:
        raise DegenerateGeometryError("pca_frame needs at least 3 points")

    centroid = xyz.mean(axis=0)
    cov = np.cov(xyz - centroid, rowvar=False, bias=True)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    if not eigvals[0] > 0 or eigvals[1] / eigvals[0] < EIGEN_RATIO_MIN:
        raise DegenerateGeometryError("rank-deficient covariance")

    a1 = _orient_a1(eigvecs[:, 0])
    a2 = _orient_a2(eigvecs[:, 1])
    a3 = np.cross(a1, a2)
    a3 /= np.linalg.norm(a3)
    # 수치 오차 보정
    a2 = np.cross(a3, a1)

    return Frame(centroid, a1, a2, a3)


def transform_to_frame(cloud: PointCloud, frame: Frame) -> PointCloud:
    """p -> ((p-o)·a1, (p-o)·a2, (p-o)·a3), 색상과 순서 유지"""
    return PointCloud(frame.project(cloud.xyz), cloud.rgb, cloud.warnings)
