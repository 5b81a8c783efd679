"""
Scaling fits on log axes.
"""

import math
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from src.app.utils.errors import ArgumentError


class PowerLawFit(NamedTuple):
    exponent: float
    prefactor: float
    r_squared: float
    exponent_stderr: float


class DoubleLogFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float


def _as_arrays(
    xs: Sequence[float], ys: Sequence[float]
) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ArgumentError("x and y must be 1-d sequences of equal length")
    if x.size < 3:
        raise ArgumentError(f"need at least 3 points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ArgumentError("x and y must be finite")
    return x, y


def _r_squared(rvalue: float) -> float:
    return 1.0 if math.isnan(rvalue) else float(rvalue) ** 2


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """Least squares of log y on log x: y ~ prefactor * x^exponent."""
    x, y = _as_arrays(xs, ys)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ArgumentError("power-law fit needs positive x and y")
    res = linregress(np.log(x), np.log(y))
    return PowerLawFit(
        exponent=float(res.slope),
        prefactor=math.exp(res.intercept),
        r_squared=_r_squared(res.rvalue),
        exponent_stderr=float(res.stderr),
    )


def fit_double_log(betas: Sequence[float], hs: Sequence[float]) -> DoubleLogFit:
    """Least squares of log(-log h) on log beta.

    Slope -2 matches h = exp(-c/beta^2), slope -1 matches h = exp(-c/beta).
    """
    b, h = _as_arrays(betas, hs)
    if np.any(b <= 0.0):
        raise ArgumentError("double-log fit needs beta > 0")
    if np.any(h <= 0.0) or np.any(h >= 1.0):
        raise ArgumentError("double-log fit needs h in (0, 1)")
    res = linregress(np.log(b), np.log(-np.log(h)))
    return DoubleLogFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        r_squared=_r_squared(res.rvalue),
        slope_stderr=float(res.stderr),
    )
