from .metrics import mae, mape, std_abs_error, std_pct_error
from .report import ComparisonBlock, SpacingReport, SpacingResult, build_report, measure_spacing
from .summary import summarize_cases

__all__ = [
    "ComparisonBlock",
    "SpacingReport",
    "SpacingResult",
    "build_report",
    "mae",
    "mape",
    "measure_spacing",
    "std_abs_error",
    "std_pct_error",
    "summarize_cases",
]
