"""
Search for the largest h at which F(beta, h) = 0 can be certified.

For fixed (theta, eta, n) the delocalization criterion is monotone in h
(a_theta and tilde r_n both increase with h), so each candidate gets a log-h
bisection below the ceiling where a_theta = 1. Marginal candidates tie the rank
to the shift strength, n = mult/(eta beta)^2; homogeneous candidates take every
rank of a small grid. A bounded scalar refinement of theta and log eta, and of
the rank for homogeneous profiles, follows the grid.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Set, Tuple

from scipy.optimize import minimize_scalar

from src.app.certificates.deloc import apply_strict, deloc_certify
from src.app.certificates.holder import homogeneous_profile, marginal_profile
from src.app.certificates.search import bisect_predicate
from src.app.config.settings import settings
from src.app.core.disorder import log_mgf
from src.app.models.certificates import (
    DelocCertificate,
    DelocSearchResult,
    DelocSearchSpace,
    SearchFamily,
    ShiftProfile,
)
from src.app.models.params import DisorderModel, ModelParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Candidate:
    family: SearchFamily
    theta: float
    eta: float = 0.0
    n: int = 0
    # Marginal rank multiplier; n follows eta when eta is refined
    mult: float = field(default=1.0, compare=False)


class _BudgetSpent(Exception):
    pass


def reference_rank(eta: float, beta: float) -> float:
    """1/(eta beta)^2, the natural system size for a shift of strength eta."""
    return 1.0 / (eta * beta) ** 2


def coupled_rank(eta: float, beta: float, mult: float, n_cap: int) -> int:
    return min(max(1, round(mult * reference_rank(eta, beta))), n_cap)


def build_profile(cand: Candidate, s: int) -> Optional[ShiftProfile]:
    if cand.family is SearchFamily.MARGINAL:
        return marginal_profile(cand.eta, cand.n, s)
    if cand.family is SearchFamily.HOMOGENEOUS:
        # delta = eta s^{-n/2} keeps sum |V_i| delta^2 close to eta^2
        return homogeneous_profile(cand.eta * s ** (-cand.n / 2.0), cand.n, s)
    return None


def log_h_ceiling(params: ModelParams, d: DisorderModel, theta: float) -> float:
    """log of the largest h with a_theta <= 1, or -inf when there is none."""
    beta = params.beta
    h_max = log_mgf(d, beta) - log_mgf(d, theta * beta) / theta
    return math.log(h_max) if h_max > 0.0 else -math.inf


def max_certified(
    params: ModelParams,
    d: DisorderModel,
    cand: Candidate,
    space: DelocSearchSpace,
) -> Optional[DelocCertificate]:
    """Certificate at the largest certified h for one candidate, if any."""
    log_hi = log_h_ceiling(params, d, cand.theta)
    if log_hi <= space.log_h_floor:
        return None
    profile = build_profile(cand, params.s)
    cache: Dict[float, DelocCertificate] = {}

    def certify(log_h: float) -> DelocCertificate:
        if log_h not in cache:
            cache[log_h] = deloc_certify(
                params.with_h(math.exp(log_h)), d, cand.theta, profile
            )
        return cache[log_h]

    if not certify(space.log_h_floor).certified:
        return None
    if certify(log_hi).certified:
        return certify(log_hi)
    result = bisect_predicate(
        lambda x: certify(x).certified,
        space.log_h_floor,
        log_hi,
        space.rel_tol,
        space.max_bisection_steps,
    )
    return certify(result.good)


def _key(cand: Candidate, cert: DelocCertificate) -> Tuple[float, float, float, int]:
    return (cert.params.h, -cand.theta, cand.eta, cand.n)


def grid_candidates(
    params: ModelParams, space: DelocSearchSpace
) -> List[Candidate]:
    seen: Set[Candidate] = set()
    out: List[Candidate] = []
    for family in space.families:
        for theta in space.thetas:
            if family is SearchFamily.PLAIN:
                cands = [Candidate(family, theta)]
            elif family is SearchFamily.MARGINAL:
                cands = [
                    Candidate(
                        family,
                        theta,
                        eta,
                        coupled_rank(eta, params.beta, mult, space.n_cap),
                        mult,
                    )
                    for eta in space.etas
                    for mult in space.n_multipliers
                ]
            else:
                ranks = [n for n in space.ranks if 1 <= n <= space.n_cap]
                cands = [
                    Candidate(family, theta, eta, n)
                    for eta in space.etas
                    for n in ranks
                ]
            for cand in cands:
                if cand not in seen:
                    seen.add(cand)
                    out.append(cand)
    return out


class DelocOptimizer:
    """Budgeted search over candidates; every evaluation is one candidate."""

    def __init__(
        self,
        params: ModelParams,
        d: DisorderModel,
        space: DelocSearchSpace,
        executor: Optional[Executor] = None,
    ) -> None:
        self.params = params
        self.d = d
        self.space = space
        self.executor = executor
        self.evaluations = 0
        self.results: Dict[Candidate, Optional[DelocCertificate]] = {}

    def _evaluate(self, cand: Candidate) -> Optional[DelocCertificate]:
        if cand in self.results:
            return self.results[cand]
        if self.evaluations >= self.space.max_evaluations:
            raise _BudgetSpent
        self.evaluations += 1
        cert = max_certified(self.params, self.d, cand, self.space)
        self.results[cand] = cert
        return cert

    def run_grid(self) -> bool:
        """Evaluate the grid; False if the budget cut it short."""
        cands = grid_candidates(self.params, self.space)
        room = self.space.max_evaluations - self.evaluations
        complete = len(cands) <= room
        cands = cands[:room]

        def one(c: Candidate) -> Optional[DelocCertificate]:
            return max_certified(self.params, self.d, c, self.space)

        if self.executor is None:
            certs = [one(c) for c in cands]
        else:
            certs = list(self.executor.map(one, cands))
        for cand, cert in zip(cands, certs):
            self.results[cand] = cert
        self.evaluations += len(cands)
        return complete

    def best(self) -> Optional[Tuple[Candidate, DelocCertificate]]:
        ranked = self.ranked()
        return ranked[0] if ranked else None

    def _best_candidate(self) -> Candidate:
        top = self.best()
        assert top is not None
        return top[0]

    def ranked(self) -> List[Tuple[Candidate, DelocCertificate]]:
        found = [(c, cert) for c, cert in self.results.items() if cert is not None]
        return sorted(found, key=lambda item: _key(*item), reverse=True)

    def _scalar_refine(
        self,
        make: Callable[[float], Candidate],
        lo: float,
        hi: float,
    ) -> None:
        if hi - lo <= 1e-9:
            return
        floor = -self.space.log_h_floor

        def objective(x: float) -> float:
            cert = self._evaluate(make(x))
            return floor if cert is None else -math.log(cert.params.h)

        minimize_scalar(
            objective,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-3, "maxiter": 12},
        )

    def refine(self) -> None:
        top = self.best()
        if top is None:
            return
        cand = top[0]
        search = settings.search
        theta_lo = max(0.01, cand.theta - search.THETA_REFINE_HALF_WIDTH)
        theta_hi = min(search.THETA_MAX, cand.theta + search.THETA_REFINE_HALF_WIDTH)
        self._scalar_refine(
            lambda t: Candidate(
                cand.family, round(t, 6), cand.eta, cand.n, cand.mult
            ),
            theta_lo,
            theta_hi,
        )
        if cand.family is SearchFamily.PLAIN:
            return

        cand = self._best_candidate()
        log_eta = math.log(cand.eta)
        width = search.LOG_ETA_REFINE_HALF_WIDTH
        self._scalar_refine(
            lambda x: self._with_eta(cand, round(math.exp(x), 6)),
            log_eta - width,
            log_eta + width,
        )

        cand = self._best_candidate()
        if cand.family is not SearchFamily.HOMOGENEOUS:
            return
        for offset in search.N_REFINE_OFFSETS:
            n = cand.n + offset
            if 1 <= n <= self.space.n_cap:
                self._evaluate(Candidate(cand.family, cand.theta, cand.eta, n))

    def _with_eta(self, cand: Candidate, eta: float) -> Candidate:
        if cand.family is SearchFamily.MARGINAL:
            n = coupled_rank(eta, self.params.beta, cand.mult, self.space.n_cap)
            return Candidate(cand.family, cand.theta, eta, n, cand.mult)
        return Candidate(cand.family, cand.theta, eta, cand.n)


def deloc_optimize(
    params: ModelParams,
    d: DisorderModel,
    space: Optional[DelocSearchSpace] = None,
    strict: bool = False,
    executor: Optional[Executor] = None,
) -> DelocSearchResult:
    """Best delocalization certificate at fixed beta and the certified h_lb."""
    space = space or DelocSearchSpace()
    if params.beta == 0.0:
        return DelocSearchResult(
            h_lb=0.0, reason="beta = 0: a_theta <= 1 forces h <= 0"
        )

    opt = DelocOptimizer(params, d, space, executor)
    exhausted = not opt.run_grid()
    if space.refine and not exhausted:
        try:
            opt.refine()
        except _BudgetSpent:
            exhausted = True

    ranked = opt.ranked()
    chosen: Optional[DelocCertificate] = None
    for _, cert in ranked:
        if strict:
            cert = apply_strict(cert, d)
            if not cert.certified:
                continue
        chosen = cert
        break

    if chosen is None:
        log.info(f"deloc_optimize beta={params.beta}: nothing certified")
        return DelocSearchResult(
            h_lb=0.0,
            evaluations=opt.evaluations,
            budget_exhausted=exhausted,
            reason=f"no candidate certified F = 0 among {len(opt.results)} tried",
        )

    log.info(
        f"deloc_optimize beta={params.beta}: h_lb={chosen.params.h:.6g} "
        f"theta={chosen.theta} eta={chosen.eta} n={chosen.witness_n} "
        f"after {opt.evaluations} evaluations"
    )
    return DelocSearchResult(
        certificate=chosen,
        h_lb=chosen.params.h,
        evaluations=opt.evaluations,
        budget_exhausted=exhausted,
    )


def _slack(cert: DelocCertificate) -> float:
    if cert.x_theta_value is None or cert.log_a_theta > 0.0:
        return -math.inf
    return cert.x_theta_value - cert.u_bound


def best_at_h(
    params: ModelParams,
    d: DisorderModel,
    space: Optional[DelocSearchSpace] = None,
    n: Optional[int] = None,
    strict: bool = False,
) -> Tuple[Optional[DelocCertificate], int, bool]:
    """Best certificate over the candidate grid at the fixed point (beta, h).

    Returns (certificate, evaluations, budget exhausted). Certified candidates
    rank first, then by the slack x_theta - u_bound; `n` pins the rank of every
    shifted candidate.
    """
    space = space or DelocSearchSpace()
    if params.beta > 0.0:
        cands = grid_candidates(params, space)
    else:
        cands = [Candidate(SearchFamily.PLAIN, t) for t in space.thetas]
    if n is not None:
        pinned = [
            Candidate(c.family, c.theta, c.eta, n)
            if c.family is not SearchFamily.PLAIN
            else c
            for c in cands
        ]
        cands = list(dict.fromkeys(pinned))
    exhausted = len(cands) > space.max_evaluations
    cands = cands[: space.max_evaluations]

    certs = [
        deloc_certify(params, d, c.theta, build_profile(c, params.s)) for c in cands
    ]
    if not certs:
        return None, 0, exhausted
    order = sorted(
        range(len(certs)),
        key=lambda i: (certs[i].certified, _slack(certs[i]), -i),
        reverse=True,
    )
    if strict and certs[order[0]].certified:
        rejected = None
        for i in order:
            if not certs[i].certified:
                break
            checked = apply_strict(certs[i], d)
            if checked.certified:
                return checked, len(certs), exhausted
            rejected = rejected or checked
        return rejected, len(certs), exhausted
    return certs[order[0]], len(certs), exhausted
