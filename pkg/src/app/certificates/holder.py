"""
Shift profiles and the Hoelder cost of the change of measure.

Shifting every omega_j, j in V_i, down by delta_i costs, after Hoelder's
inequality with exponent 1/theta,

    Gaussian:  exp(theta/(2(1-theta)) sum_i |V_i| delta_i^2)
    general:   exp((1-theta) sum_i |V_i| [log M(theta delta_i/(1-theta))
                                          + theta/(1-theta) log M(-delta_i)])
"""

import math
from typing import Iterable, List, Sequence, Tuple

from src.app.core.disorder import log_mgf
from src.app.models.certificates import ShiftKind, ShiftProfile
from src.app.models.params import DisorderModel
from src.app.utils.errors import ArgumentError

_LOG_FLOAT_MAX = 709.0


def marginal_profile(eta: float, n: int, s: int) -> ShiftProfile:
    """delta_i = eta s^{(i-n)/2} / sqrt(n)."""
    if eta < 0:
        raise ArgumentError(f"eta must be >= 0, got {eta}")
    root_n = math.sqrt(n)
    deltas = [eta * s ** ((i - n) / 2.0) / root_n for i in range(n)]
    return ShiftProfile(s=s, n=n, deltas=deltas, kind=ShiftKind.MARGINAL, parameter=eta)


def homogeneous_profile(delta: float, n: int, s: int) -> ShiftProfile:
    if delta < 0:
        raise ArgumentError(f"delta must be >= 0, got {delta}")
    return ShiftProfile(
        s=s, n=n, deltas=[delta] * n, kind=ShiftKind.HOMOGENEOUS, parameter=delta
    )


def custom_profile(deltas: Sequence[float], s: int) -> ShiftProfile:
    if not deltas or min(deltas) < 0:
        raise ArgumentError("a custom profile needs at least one delta, all >= 0")
    return ShiftProfile(s=s, n=len(deltas), deltas=list(deltas))


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < 1.0:
        raise ArgumentError(f"theta must lie in (0, 1), got {theta!r}")


def log_vi_sizes(n: int, s: int) -> List[float]:
    """log |V_i| for i = 0..n-1; |V_0| alone leaves the float range past n ~ 512."""
    log_s = math.log(s)
    base = math.log(s - 1)
    return [base + (n - 1 - i) * log_s for i in range(n)]


def _weighted_fsum(terms: Iterable[Tuple[float, float]]) -> float:
    """fsum of sign * exp(log_abs) over (log_abs, sign) pairs; +-inf past 709."""
    values = []
    for log_abs, sign in terms:
        if log_abs > _LOG_FLOAT_MAX:
            return math.copysign(math.inf, sign)
        values.append(math.copysign(math.exp(log_abs), sign))
    return math.fsum(values)


def weighted_square_sum(profile: ShiftProfile) -> float:
    """sum_i |V_i| delta_i^2 (eta^2 (s-1)/s for marginal profiles)."""
    log_sizes = log_vi_sizes(profile.n, profile.s)
    return _weighted_fsum(
        (log_size + 2.0 * math.log(d), 1.0)
        for log_size, d in zip(log_sizes, profile.deltas)
        if d > 0.0
    )


def log_holder_cost_gaussian(profile: ShiftProfile, theta: float) -> float:
    _check_theta(theta)
    return theta / (2.0 * (1.0 - theta)) * weighted_square_sum(profile)


def holder_cost_gaussian(profile: ShiftProfile, theta: float) -> float:
    return math.exp(log_holder_cost_gaussian(profile, theta))


def log_holder_cost_tilt(
    d: DisorderModel, profile: ShiftProfile, theta: float
) -> float:
    _check_theta(theta)
    ratio = theta / (1.0 - theta)
    log_sizes = log_vi_sizes(profile.n, profile.s)
    terms = []
    for log_size, delta in zip(log_sizes, profile.deltas):
        if delta == 0.0:
            continue
        bracket = log_mgf(d, ratio * delta) + ratio * log_mgf(d, -delta)
        if bracket != 0.0:
            terms.append((log_size + math.log(abs(bracket)), bracket))
    return (1.0 - theta) * _weighted_fsum(terms)


def holder_cost_tilt(d: DisorderModel, profile: ShiftProfile, theta: float) -> float:
    return math.exp(log_holder_cost_tilt(d, profile, theta))
