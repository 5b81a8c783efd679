"""
Variance control at the scale n1 in the marginal case: with h = exp(-c5/beta),
the relative variance at n1 (first level with p_n >= 1) stays below beta.
"""

import logging
import math
from typing import Optional, Sequence

from src.app.config.settings import settings
from src.app.core.annealed import annealed_step
from src.app.core.disorder import gamma
from src.app.core.variance import variance_step
from src.app.models.certificates import Lemma22Result
from src.app.models.params import DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError

log = logging.getLogger(__name__)


def lemma22_check(params: ModelParams, d: DisorderModel, c5: float) -> Lemma22Result:
    """Pass iff v_{n1} <= beta at h = exp(-c5/beta)."""
    if not params.is_marginal:
        raise ArgumentError(
            f"the variance check at n1 is stated for b = sqrt(s); got b={params.b}, "
            f"s={params.s}"
        )
    if params.beta <= 0.0:
        raise ArgumentError(f"beta must be > 0, got {params.beta}")
    if c5 <= 0.0:
        raise ArgumentError(f"c5 must be > 0, got {c5}")

    beta = params.beta
    h = math.exp(-c5 / beta)
    point = params.with_h(h)
    g = gamma(d, beta)
    cap = settings.recursion.N1_CAP

    log_r, v = 0.0, 0.0
    for n in range(1, cap + 1):
        v = variance_step(log_r, v, point, d, g)
        log_r = annealed_step(log_r, point)
        if math.isinf(v):
            return Lemma22Result(
                passed=False,
                c5=c5,
                beta=beta,
                h=h,
                details=f"variance blown up at n={n} before p_n reached 1",
            )
        if math.expm1(log_r) >= 1.0:
            passed = v <= beta
            return Lemma22Result(
                passed=passed,
                c5=c5,
                beta=beta,
                h=h,
                n1=n,
                v_at_n1=v,
                details=f"v_n1={v:.6g} {'<=' if passed else '>'} beta={beta}",
            )
    return Lemma22Result(
        passed=False, c5=c5, beta=beta, h=h, details=f"n1 exceeded the cap of {cap}"
    )


def lemma22_scan(
    params: ModelParams,
    d: DisorderModel,
    betas: Sequence[float],
    c5_grid: Optional[Sequence[float]] = None,
) -> Optional[float]:
    """Smallest c5 of the grid that passes for every beta, if any."""
    grid = sorted(c5_grid or settings.search.C5_GRID)
    for c5 in grid:
        results = [lemma22_check(params.with_beta(beta), d, c5) for beta in betas]
        if all(r.passed for r in results):
            log.info(f"lemma22 scan: c5={c5} passes for betas {list(betas)}")
            return c5
    return None
