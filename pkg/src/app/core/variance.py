"""
Exact second-moment recursion.

With X = prod_j R_n^(j) prod_j A_j and R_{n+1} = (X + b - 1)/b, independence of
the factors gives Var R_{n+1} = Var X / b^2, so the relative variance obeys

    v_{n+1} = r^{2s} e^{2(s-1)h} / (r^s e^{(s-1)h} + b - 1)^2
              * [(1 + v_n)^s e^{(s-1) gamma} - 1]
"""

import math
from typing import Optional

import numpy as np

from src.app.config.settings import settings
from src.app.core.disorder import gamma as gamma_of
from src.app.models.params import DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError


def _log_mean_x(log_r: float, params: ModelParams) -> float:
    return params.s * log_r + (params.s - 1) * params.h


def _resolve_gamma(
    params: ModelParams, d: Optional[DisorderModel], g: Optional[float]
) -> float:
    if g is not None:
        return g
    if d is None:
        raise ArgumentError("variance_step needs a disorder law or a gamma value")
    return gamma_of(d, params.beta)


def _log_growth(v: float, s: int, g: float) -> float:
    return s * math.log1p(v) + (s - 1) * g


def variance_step(
    log_r: float,
    v: float,
    params: ModelParams,
    d: Optional[DisorderModel],
    g: Optional[float] = None,
) -> float:
    """v_{n+1} from (log r_n, v_n); +inf once the variance is blown up.

    `g` short-circuits the gamma(beta) evaluation for callers iterating at fixed
    beta.
    """
    if v < 0 or math.isnan(v):
        raise ArgumentError(f"relative variance must be >= 0, got {v!r}")
    if math.isinf(v):
        return math.inf
    g = _resolve_gamma(params, d, g)
    growth = _log_growth(v, params.s, g)
    if growth > settings.recursion.VARIANCE_SATURATION_LOG:
        return math.inf
    if growth == 0.0:
        return 0.0

    z = _log_mean_x(log_r, params)
    log_prefactor = 2.0 * z - 2.0 * float(np.logaddexp(z, math.log(params.b - 1.0)))
    return max(math.exp(log_prefactor) * math.expm1(growth), 0.0)


def delta_step(
    log_r: float,
    delta: float,
    params: ModelParams,
    d: Optional[DisorderModel],
    g: Optional[float] = None,
) -> float:
    """Absolute variance Delta_{n+1} = Var R_{n+1} from (log r_n, Delta_n).

    Delta_{n+1} = e^{2z} [(1 + Delta_n/r_n^2)^s e^{(s-1) gamma} - 1] / b^2 with
    z = s log r_n + (s-1) h.
    """
    if delta < 0:
        raise ArgumentError(f"variance must be >= 0, got {delta!r}")
    g = _resolve_gamma(params, d, g)
    v = delta * math.exp(-2.0 * log_r)
    growth = _log_growth(v, params.s, g)
    if growth > settings.recursion.VARIANCE_SATURATION_LOG:
        return math.inf
    z = _log_mean_x(log_r, params)
    log_scale = 2.0 * z - 2.0 * math.log(params.b)
    if log_scale > settings.recursion.VARIANCE_SATURATION_LOG:
        return math.inf
    return math.exp(log_scale) * math.expm1(growth)
