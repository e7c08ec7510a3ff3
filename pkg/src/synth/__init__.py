"""합성 장면 생성 및 벤치마크 모듈"""

from .benchmark import BENCHMARK_COLUMNS, run_benchmark
from .scene import (
    ASSUMPTIONS,
    SOURCES,
    GroundTruth,
    SceneSpec,
    apply_pose,
    generate_scene,
    ground_truth_references,
    read_scene_spec,
    scene_spec_from_dict,
    suggested_crop_box,
    with_seed,
    write_ground_truth,
)

__all__ = [
    "ASSUMPTIONS",
    "BENCHMARK_COLUMNS",
    "GroundTruth",
    "SOURCES",
    "SceneSpec",
    "apply_pose",
    "generate_scene",
    "ground_truth_references",
    "read_scene_spec",
    "run_benchmark",
    "scene_spec_from_dict",
    "suggested_crop_box",
    "with_seed",
    "write_ground_truth",
]
