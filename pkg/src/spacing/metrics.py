"""비교 지표 - MAE, MAPE 및 표준편차"""

from typing import Sequence

import numpy as np

from ..errors import DomainError, PairingError


def _paired(pc: Sequence[float], mt: Sequence[float]) -> tuple:
    pc = np.asarray(pc, dtype=np.float64).reshape(-1)
    mt = np.asarray(mt, dtype=np.float64).reshape(-1)
    if len(pc) != len(mt):
        raise PairingError(f"length mismatch: {len(pc)} measured vs {len(mt)} reference values")
    if len(pc) == 0:
        raise PairingError("no pairs to compare")
    return pc, mt


def absolute_errors(pc: Sequence[float], mt: Sequence[float]) -> np.ndarray:
    pc, mt = _paired(pc, mt)
    return np.abs(pc - mt)


def percentage_errors(pc: Sequence[float], mt: Sequence[float]) -> np.ndarray:
    """100·|pc - mt| / mt"""
    pc, mt = _paired(pc, mt)
    if np.any(mt <= 0):
        raise DomainError("reference values must be > 0 for MAPE")
    return 100.0 * np.abs(pc - mt) / mt


def mae(pc: Sequence[float], mt: Sequence[float]) -> float:
    """(1/n)·Σ|pc_i - mt_i| (mm)"""
    return float(absolute_errors(pc, mt).mean())


def mape(pc: Sequence[float], mt: Sequence[float]) -> float:
    """(100/n)·Σ|pc_i - mt_i|/mt_i (%)"""
    return float(percentage_errors(pc, mt).mean())


def std_abs_error(pc: Sequence[float], mt: Sequence[float]) -> float:
    """절대 오차의 모표준편차 (mm)"""
    return float(absolute_errors(pc, mt).std())


def std_pct_error(pc: Sequence[float], mt: Sequence[float]) -> float:
    """백분율 오차의 모표준편차 (%)"""
    return float(percentage_errors(pc, mt).std())
