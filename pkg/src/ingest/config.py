"""파이프라인 설정 로드 및 검증

JSON(.json) 또는 YAML(.yaml/.yml) 파일을 읽어 PipelineConfig로 변환합니다.
누락된 선택 키는 기본값을 사용하고, crop_box는 필수입니다.
"""

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Union

import yaml

from ..cloud import Aabb
from ..errors import ConfigError, ParameterError

logger = logging.getLogger(__name__)

CROP_KEEP_VALUES = ("inside", "outside")


@dataclass(frozen=True)
class PipelineConfig:
    """측정 파이프라인 파라미터 (길이 단위: 미터)"""

    crop_box: Aabb
    crop_keep: str = "inside"
    ground_bin_size: float = 0.05
    sor_k: int = 100
    sor_std_ratio: float = 1.0
    voxel_size: float = 0.01
    ransac_distance: float = 0.01
    ransac_samples: int = 3
    ransac_iterations: int = 1000
    dbscan_eps: float = 0.05
    dbscan_min_points: int = 30
    member_bin_size: float = 0.02
    brace_min_extent: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        for key in ("ground_bin_size", "sor_std_ratio", "voxel_size", "ransac_distance",
                    "dbscan_eps", "member_bin_size"):
            value = getattr(self, key)
            if not _is_number(value) or not value > 0:
                raise ConfigError(key, f"{key} must be > 0")
            object.__setattr__(self, key, float(value))

        if not _is_number(self.brace_min_extent) or self.brace_min_extent < 0:
            raise ConfigError("brace_min_extent", "brace_min_extent must be >= 0")
        object.__setattr__(self, "brace_min_extent", float(self.brace_min_extent))

        for key, minimum in (("sor_k", 1), ("ransac_samples", 3), ("ransac_iterations", 1),
                             ("dbscan_min_points", 1)):
            value = getattr(self, key)
            if not _is_integer(value):
                raise ConfigError(key, f"{key} must be an integer")
            if value < minimum:
                raise ConfigError(key, f"{key} must be >= {minimum}")

        if not _is_integer(self.rng_seed) or not 0 <= self.rng_seed < 2 ** 64:
            raise ConfigError("rng_seed", "rng_seed must be an integer in [0, 2^64)")

        if self.crop_keep not in CROP_KEEP_VALUES:
            raise ConfigError("crop_keep", "crop_keep must be 'inside' or 'outside'")
        if not isinstance(self.crop_box, Aabb):
            raise ConfigError("crop_box", "crop_box must be an Aabb")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["crop_box"] = self.crop_box.to_dict()
        return data


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_integer(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_crop_box(raw) -> Aabb:
    if not isinstance(raw, dict) or set(raw) != {"min", "max"}:
        raise ConfigError("crop_box", "crop_box must be an object with 'min' and 'max'")
    try:
        return Aabb(tuple(raw["min"]), tuple(raw["max"]))
    except (TypeError, ValueError, ParameterError) as e:
        raise ConfigError("crop_box", f"crop_box invalid: {e}")


def load_structured(path: Union[str, Path]) -> dict:
    """확장자에 따라 JSON 또는 YAML 파일 로드"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"파일을 찾을 수 없습니다: {path}")

    with open(path, "r", encoding="utf-8") as f:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(f)
        return json.load(f)


def config_from_dict(raw: dict) -> PipelineConfig:
    """dict -> PipelineConfig (키 이름을 포함한 검증 오류)"""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be an object")

    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(unknown[0], f"unknown key: {unknown[0]}")
    if "crop_box" not in raw:
        raise ConfigError("crop_box", "missing required key: crop_box")

    values = dict(raw)
    values["crop_box"] = _parse_crop_box(raw["crop_box"])
    return PipelineConfig(**values)


def read_config(path: Union[str, Path]) -> PipelineConfig:
    """
    설정 파일 읽기

    Args:
        path: JSON 또는 YAML 설정 파일 경로

    Returns:
        검증된 PipelineConfig
    """
    try:
        raw = load_structured(path)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError("<root>", f"config parse error: {e}")

    config = config_from_dict(raw)
    logger.info(f"설정 로드: {path}")
    return config
