"""
Bracket h_c(beta) between a delocalization and a localization certificate.
"""

import logging
import math
from concurrent.futures import Executor
from typing import Dict, Optional, Tuple

import numpy as np

from src.app.certificates.loc import loc_certify, loc_threshold
from src.app.certificates.optimizer import deloc_optimize
from src.app.certificates.search import bisect_predicate
from src.app.config.settings import settings
from src.app.models.certificates import DelocSearchSpace, HcBracket, LocCertificate
from src.app.models.params import DisorderModel, ModelParams
from src.app.utils.errors import SoundnessAlarm

log = logging.getLogger(__name__)

_STRICT_RETRIES = 5


class LocSearch:
    """Log-h bisection for the smallest h certified by loc_certify."""

    def __init__(
        self,
        params: ModelParams,
        d: DisorderModel,
        space: DelocSearchSpace,
        split: float = 0.0,
    ) -> None:
        self.params = params
        self.d = d
        self.space = space
        self.split = split
        self.evaluations = 0
        self._cache: Dict[float, LocCertificate] = {}

    def certify(self, log_h: float, strict: bool = False) -> LocCertificate:
        if strict or log_h not in self._cache:
            self.evaluations += 1
            cert = loc_certify(
                self.params.with_h(math.exp(log_h)), self.d, self.split, strict=strict
            )
            if strict:
                return cert
            self._cache[log_h] = cert
        return self._cache[log_h]

    def log_h_ceiling(self) -> float:
        """A log h certified at level 0: one above the h = 0 threshold."""
        return math.log(loc_threshold(self.params.with_h(0.0), self.d) + 1.0)

    def search(self, strict: bool = False) -> Tuple[Optional[LocCertificate], bool]:
        """(certificate at the smallest certified h, bisection converged)."""
        hi = self.log_h_ceiling()
        lo = self.space.log_h_floor
        if not self.certify(hi).certified:
            log.warning(f"loc search beta={self.params.beta}: ceiling not certified")
            return None, False
        if self.certify(lo).certified:
            good, converged = lo, True
        else:
            result = bisect_predicate(
                lambda x: self.certify(x).certified,
                hi,
                lo,
                self.space.rel_tol,
                self.space.max_bisection_steps,
            )
            good, converged = result.good, result.converged
        if not strict:
            return self.certify(good), converged

        step = math.log1p(self.space.rel_tol)
        for k in range(_STRICT_RETRIES + 1):
            cert = self.certify(min(good + k * step, hi), strict=True)
            if cert.certified:
                return cert, converged
        return None, converged

    def monotonicity_violations(self, log_h_ub: float, checks: int) -> int:
        """Check log-spaced h above h_ub; every Inconclusive verdict is a violation."""
        hi = self.log_h_ceiling()
        if checks <= 0 or log_h_ub >= hi:
            return 0
        violations = 0
        for x in np.linspace(log_h_ub, hi, checks + 2)[1:-1]:
            if not self.certify(float(x)).certified:
                violations += 1
                log.warning(
                    f"loc verdict not monotone in h at beta={self.params.beta}: "
                    f"h={math.exp(x):.6g} inconclusive above "
                    f"h_ub={math.exp(log_h_ub):.6g}"
                )
        return violations


def hc_bracket(
    params: ModelParams,
    d: DisorderModel,
    space: Optional[DelocSearchSpace] = None,
    strict: bool = False,
    split: float = 0.0,
    checks: int = -1,
    executor: Optional[Executor] = None,
) -> HcBracket:
    """h_lb from deloc_optimize and h_ub from a loc bisection at params.beta.

    Raises SoundnessAlarm when the two sides cross or when a loc verdict above
    h_ub is inconclusive.
    """
    space = space or DelocSearchSpace()
    checks = settings.search.MONOTONICITY_CHECKS if checks < 0 else checks
    beta = params.beta

    lb = deloc_optimize(params.with_h(0.0), d, space, strict=strict, executor=executor)
    if lb.certificate is not None:
        h_lb: Optional[float] = lb.h_lb
    elif beta == 0.0:
        h_lb = 0.0
    else:
        h_lb = None

    ub_search = LocSearch(params, d, space, split)
    ub_cert, converged = ub_search.search(strict=strict)
    h_ub = ub_cert.params.h if ub_cert is not None else None
    violations = 0
    if ub_cert is not None:
        log_h_ub = math.log(ub_cert.params.h)
        violations = ub_search.monotonicity_violations(log_h_ub, checks)

    bracket = HcBracket(
        beta=beta,
        h_lb=h_lb,
        h_ub=h_ub,
        lb_certificate=lb.certificate,
        ub_certificate=ub_cert,
        lb_evaluations=lb.evaluations,
        ub_evaluations=ub_search.evaluations,
        monotonicity_violations=violations,
        budget_exhausted=lb.budget_exhausted or not converged,
    )
    if h_lb is not None and h_ub is not None and h_lb > h_ub:
        log.error(f"inverted bracket at beta={beta}: h_lb={h_lb!r} > h_ub={h_ub!r}")
        raise SoundnessAlarm(
            f"inverted bracket at beta={beta}: h_lb={h_lb!r} > h_ub={h_ub!r}"
        )
    if violations:
        log.error(f"loc verdicts not monotone in h at beta={beta}: {violations}")
        raise SoundnessAlarm(
            f"{violations} inconclusive loc verdicts above h_ub={h_ub!r} "
            f"at beta={beta}"
        )
    log.info(f"hc_bracket beta={beta}: h_lb={h_lb} h_ub={h_ub}")
    return bracket
