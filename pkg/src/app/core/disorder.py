"""
Disorder moment generating functions.

log M(t) = log E[exp(t omega)] for the built-in laws and for user tables, plus
gamma(beta) = log M(2 beta) - 2 log M(beta), the exponent driving the variance.
"""

import math
from typing import Tuple, Union

import numpy as np

from src.app.config.settings import settings
from src.app.models.params import DisorderKind, DisorderModel
from src.app.utils.errors import DomainError, UnsupportedSamplingError

LOG2 = math.log(2.0)


def _log_cosh(t: float) -> float:
    a = abs(t)
    if a < 1.0:
        # cosh t - 1 = 2 sinh^2(t/2) keeps relative precision near 0
        return math.log1p(2.0 * math.sinh(0.5 * a) ** 2)
    return a + math.log1p(math.exp(-2.0 * a)) - LOG2


def check_domain(d: DisorderModel, t: float) -> None:
    lo, hi = d.domain
    if not (lo <= t <= hi) or math.isnan(t):
        raise DomainError(t, (lo, hi))


def log_mgf(d: DisorderModel, t: float) -> float:
    """Return log M(t); raises DomainError outside the law's domain."""
    check_domain(d, t)
    if d.kind is DisorderKind.GAUSSIAN:
        return 0.5 * t * t
    if d.kind is DisorderKind.BINARY_PM1:
        return _log_cosh(t)
    assert d.table_t is not None and d.table_log_m is not None
    return float(np.interp(t, d.table_t, d.table_log_m))


def gamma(d: DisorderModel, beta: float) -> float:
    """log M(2 beta) - 2 log M(beta), the log of E[A^2]/E[A]^2."""
    if beta == 0.0:
        return 0.0
    return log_mgf(d, 2.0 * beta) - 2.0 * log_mgf(d, beta)


def normalization_moments(d: DisorderModel, step: float = 0.0) -> Tuple[float, float]:
    """Finite-difference (mean, variance) of omega read off log M at 0."""
    eps = step or settings.disorder.FINITE_DIFFERENCE_STEP
    plus, minus = log_mgf(d, eps), log_mgf(d, -eps)
    zero = log_mgf(d, 0.0)
    mean = (plus - minus) / (2.0 * eps)
    variance = (plus - 2.0 * zero + minus) / eps**2
    return mean, variance


def check_normalization(d: DisorderModel) -> bool:
    """True if omega is mean-zero / unit-variance to the kind's tolerance."""
    if d.kind is DisorderKind.TABLE_MGF:
        # Validated on the grid when the model was built
        return True
    mean, variance = normalization_moments(d)
    tol = settings.disorder.BUILTIN_NORMALIZATION_TOL
    return abs(mean) <= tol and abs(variance - 1.0) <= tol


def sample_omega(
    d: DisorderModel, rng: np.random.Generator, size: Union[int, Tuple[int, ...]]
) -> np.ndarray:
    """Draw i.i.d. omegas with the law of d."""
    if d.kind is DisorderKind.GAUSSIAN:
        return rng.standard_normal(size)
    if d.kind is DisorderKind.BINARY_PM1:
        return 2.0 * rng.integers(0, 2, size=size).astype(np.float64) - 1.0
    raise UnsupportedSamplingError(
        "table_mgf disorder has no sampler; it is usable by certificates only"
    )
