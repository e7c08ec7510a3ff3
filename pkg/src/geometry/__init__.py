from .frame import Frame, LineModel, PlaneModel, pca_frame, transform_to_frame
from .ransac import ransac_line, ransac_plane
from .stud_frame import detect_stud_frame

__all__ = [
    "Frame",
    "LineModel",
    "PlaneModel",
    "detect_stud_frame",
    "pca_frame",
    "ransac_line",
    "ransac_plane",
    "transform_to_frame",
]
