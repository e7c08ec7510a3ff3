"""공통 테스트 픽스처"""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from src.cloud import Aabb, PointCloud
from src.ingest import PipelineConfig
from src.synth import SceneSpec, suggested_crop_box

WIDE_BOX = Aabb((-100.0, -100.0, -100.0), (100.0, 100.0, 100.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def make_config():
    """PipelineConfig 팩토리 (기본 crop_box는 모든 점을 포함)"""

    def _make(**overrides) -> PipelineConfig:
        overrides.setdefault("crop_box", WIDE_BOX)
        return PipelineConfig(**overrides)

    return _make


@pytest.fixture
def write_text(tmp_path: Path):
    """tmp_path 아래에 텍스트 파일 작성"""

    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        return path

    return _write


def scene_config(spec: SceneSpec, **overrides) -> PipelineConfig:
    """장면 자세에 맞춘 crop_box를 가진 기본 설정"""
    return PipelineConfig(crop_box=suggested_crop_box(spec), **overrides)


def noise_free(spec: SceneSpec) -> SceneSpec:
    return replace(spec, noise_sigma=0.0, outlier_fraction=0.0, jitter_sigma=0.0)


def cloud_of(points) -> PointCloud:
    return PointCloud(np.asarray(points, dtype=np.float64))
