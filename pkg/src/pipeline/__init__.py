"""측정 파이프라인 모듈"""

from .runner import STEPS, MeasurementPipeline, dump_stages

__all__ = ["MeasurementPipeline", "STEPS", "dump_stages"]
