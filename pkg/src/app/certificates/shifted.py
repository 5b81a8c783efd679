"""
Annealed recursion under the shifted environment.

Step i -> i+1 consumes the sites of V_i, whose A factors have mean
exp(-beta delta_i + h) (Gaussian) or, for a general law tilted by delta_i,
exp(log M(beta - delta_i) - log M(beta) - log M(-delta_i) + h).
"""

import math

from src.app.core.annealed import log_step
from src.app.core.disorder import log_mgf
from src.app.models.certificates import ShiftProfile
from src.app.models.params import DisorderKind, DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError


def shifted_drift(
    d: DisorderModel, beta: float, h: float, delta: float, closed_form: bool = True
) -> float:
    """Log-mean of one A factor after shifting omega down by delta."""
    if closed_form and d.kind is DisorderKind.GAUSSIAN:
        return h - beta * delta
    if delta == 0.0:
        return h
    return log_mgf(d, beta - delta) - log_mgf(d, beta) - log_mgf(d, -delta) + h


def shifted_log_r(
    params: ModelParams,
    d: DisorderModel,
    profile: ShiftProfile,
    closed_form: bool = True,
) -> float:
    """log tilde r_n, starting from tilde r_0 = 1."""
    if profile.s != params.s:
        raise ArgumentError(
            f"profile built for s={profile.s}, model has s={params.s}"
        )
    log_r = 0.0
    for delta in profile.deltas:
        drift = shifted_drift(d, params.beta, params.h, delta, closed_form)
        log_r = log_step(log_r, params.s, params.b, drift)
    return log_r


def shifted_annealed_iterate(
    params: ModelParams,
    d: DisorderModel,
    profile: ShiftProfile,
    closed_form: bool = True,
) -> float:
    """tilde r_n (inf when it leaves the float range)."""
    log_r = shifted_log_r(params, d, profile, closed_form)
    return math.exp(log_r) if log_r < 709.0 else math.inf
