from .config import PipelineConfig, config_from_dict, load_structured, read_config
from .ply import read_ply, write_ply
from .references import ReferenceMeasurements, read_references

__all__ = [
    "PipelineConfig",
    "ReferenceMeasurements",
    "config_from_dict",
    "load_structured",
    "read_config",
    "read_ply",
    "read_references",
    "write_ply",
]
