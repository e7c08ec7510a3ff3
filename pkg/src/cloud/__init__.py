from .model import (
    Aabb,
    Axis,
    AxisHistogram,
    Point3,
    PointCloud,
    axis_histogram,
    baseline_runs,
    bounds,
    highest_peak,
    histogram_of,
)

__all__ = [
    "Aabb",
    "Axis",
    "AxisHistogram",
    "Point3",
    "PointCloud",
    "axis_histogram",
    "baseline_runs",
    "bounds",
    "highest_peak",
    "histogram_of",
]
