"""
Localization certificate.

s^{-n} [E log R_n - log b/(s-1) + h - log M(beta)] is nondecreasing in n, so
E log R_n > log b/(s-1) + log M(beta) - h at any single level gives F > 0.
E log R_n is bounded below with Chebyshev's inequality on R_n / r_n, using the
exact pair (log r_n, v_n).
"""

import logging
import math
from typing import Optional, Tuple

from src.app.certificates.strict import replay_loc
from src.app.config.settings import settings
from src.app.core.annealed import annealed_step
from src.app.core.disorder import gamma, log_mgf
from src.app.core.variance import variance_step
from src.app.models.certificates import LocCertificate, LocVerdict
from src.app.models.params import DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError

log = logging.getLogger(__name__)

REASON_BLOWN_UP = "variance blown up"
REASON_FIXED_POINT = "recursion reached a fixed point"
REASON_LEVEL_CAP = "level cap reached"
REASON_STRICT = "strict re-evaluation failed"


def loc_threshold(params: ModelParams, d: DisorderModel) -> float:
    """log b/(s-1) + log M(beta) - h."""
    return math.log(params.b) / (params.s - 1) + log_mgf(d, params.beta) - params.h


def chebyshev_conditions(
    log_r: float, v: float, b: float, split: float
) -> Tuple[bool, bool]:
    """(variance condition, energy condition) under which the bound is valid."""
    q = v / split**2
    floor = math.log((b - 1.0) / b)
    return q <= 1.0, log_r + math.log1p(-split) >= floor


def chebyshev_bound(
    log_r: float, v: float, b: float, split: float = 0.0
) -> Optional[float]:
    """Lower bound on E log R_n, or None when its validity conditions fail.

    With P(R_n <= (1-t) r_n) <= v/t^2 and R_n >= (b-1)/b:
    (1 - v/t^2)(log r_n + log(1-t)) + (v/t^2) log((b-1)/b). Exact when v = 0.
    """
    split = split or settings.certificates.CHEBYSHEV_SPLIT
    if not 0.0 < split < 1.0:
        raise ArgumentError(f"Chebyshev split must lie in (0, 1), got {split!r}")
    if v == 0.0:
        return log_r
    variance_ok, energy_ok = chebyshev_conditions(log_r, v, b, split)
    if not (variance_ok and energy_ok):
        return None
    q = v / split**2
    return (1.0 - q) * (log_r + math.log1p(-split)) + q * math.log((b - 1.0) / b)


def loc_certify(
    params: ModelParams,
    d: DisorderModel,
    split: float = 0.0,
    level_cap: int = 0,
    strict: bool = False,
    safety_margin: float = 0.0,
) -> LocCertificate:
    """Scan levels for a witness of E log R_n above the localization threshold."""
    split = split or settings.certificates.CHEBYSHEV_SPLIT
    level_cap = level_cap or settings.certificates.LOC_LEVEL_CAP
    safety_margin = safety_margin or settings.certificates.LOC_SAFETY_MARGIN
    threshold = loc_threshold(params, d)
    g = gamma(d, params.beta)

    def record(
        n: int,
        log_r: float,
        v: float,
        verdict: LocVerdict,
        bound: Optional[float],
        reason: Optional[str],
    ) -> LocCertificate:
        if math.isinf(v):
            variance_ok, energy_ok = False, False
        else:
            variance_ok, energy_ok = chebyshev_conditions(log_r, v, params.b, split)
        return LocCertificate(
            params=params,
            witness_n=n if verdict is LocVerdict.CERTIFIED_F_POSITIVE else None,
            log_r_at_n=log_r,
            v_at_n=v,
            elog_lower_bound=bound,
            threshold=threshold,
            split=split,
            variance_condition=variance_ok or v == 0.0,
            energy_condition=energy_ok or v == 0.0,
            levels_checked=n + 1,
            verdict=verdict,
            reason=reason,
        )

    log_r, v = 0.0, 0.0
    for n in range(level_cap + 1):
        if math.isinf(v):
            return record(n, log_r, v, LocVerdict.INCONCLUSIVE, None, REASON_BLOWN_UP)
        bound = chebyshev_bound(log_r, v, params.b, split)
        if bound is not None and bound > threshold + safety_margin:
            cert = record(n, log_r, v, LocVerdict.CERTIFIED_F_POSITIVE, bound, None)
            log.debug(f"loc certified beta={params.beta} h={params.h} at n={n}")
            if strict:
                cert = apply_strict(cert, d)
            return cert
        if n == level_cap:
            break
        nxt_v = variance_step(log_r, v, params, d, g)
        nxt_r = annealed_step(log_r, params)
        if nxt_r == log_r and nxt_v == v:
            return record(
                n, log_r, v, LocVerdict.INCONCLUSIVE, bound, REASON_FIXED_POINT
            )
        log_r, v = nxt_r, nxt_v

    return record(
        level_cap, log_r, v, LocVerdict.INCONCLUSIVE, None, REASON_LEVEL_CAP
    )


def apply_strict(cert: LocCertificate, d: DisorderModel) -> LocCertificate:
    if replay_loc(cert, d):
        return cert.model_copy(update={"strict_checked": True})
    log.warning(
        f"strict replay rejected loc certificate at beta={cert.params.beta} "
        f"h={cert.params.h}"
    )
    return cert.model_copy(
        update={
            "verdict": LocVerdict.INCONCLUSIVE,
            "reason": REASON_STRICT,
            "witness_n": None,
            "strict_checked": True,
        }
    )
