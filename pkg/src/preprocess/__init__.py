from .filters import (
    GROUND_REMOVED_ALL,
    centered_grid_anchor,
    mean_knn_distances,
    pass_through,
    remove_ground,
    statistical_outlier_removal,
    voxel_downsample,
)

__all__ = [
    "GROUND_REMOVED_ALL",
    "centered_grid_anchor",
    "mean_knn_distances",
    "pass_through",
    "remove_ground",
    "statistical_outlier_removal",
    "voxel_downsample",
]
