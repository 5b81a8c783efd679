"""
Annealed (pure) recursion for r_n = E[R_n], carried in log domain.

    r_{n+1} = (exp((s-1) h) r_n^s + (b-1)) / b,    r_0 = 1

together with its p_n = r_n - 1 form, n1, and the annealed free energy.
"""

import logging
import math
from typing import List, Optional

import numpy as np

from src.app.config.settings import settings
from src.app.core.disorder import gamma
from src.app.core.variance import variance_step
from src.app.models.params import DisorderModel, ModelParams
from src.app.models.traces import AnnealedTrace, TraceStatus
from src.app.utils.errors import ArgumentError, CapExceededError

log = logging.getLogger(__name__)

# expm1 overflows above this z
LOG1P_SWITCH = 700.0


def log_step(log_r: float, s: int, b: float, drift: float) -> float:
    """One step of log r -> log((exp((s-1) drift) r^s + b - 1) / b).

    `drift` is the log-mean of one A factor (h for the annealed model, a
    shifted value for tilted environments). Written as log1p(expm1(z)/b) so
    that r close to one keeps full relative precision in r - 1; r = 1 is an
    exact fixed point when drift = 0.
    """
    z = (s - 1) * drift + s * log_r
    if z < LOG1P_SWITCH:
        return math.log1p(math.expm1(z) / b)
    return float(np.logaddexp(z, math.log(b - 1.0))) - math.log(b)


def annealed_step(log_r: float, params: ModelParams) -> float:
    """log r_{n+1} from log r_n."""
    return log_step(log_r, params.s, params.b, params.h)


def annealed_step_linear(r: float, params: ModelParams) -> float:
    """Direct evaluation of the recursion (cross-check of the log-domain step)."""
    s, b, h = params.s, params.b, params.h
    return (math.exp((s - 1) * h) * r**s + (b - 1.0)) / b


def annealed_iterate(
    params: ModelParams,
    n_max: int = 0,
    div_threshold: float = 0.0,
    disorder: Optional[DisorderModel] = None,
) -> AnnealedTrace:
    """Iterate the annealed recursion up to n_max levels.

    Stops early once log r exceeds div_threshold (diverging) or r settles below
    one (converged_below_one); h = 0 is the flat case r_n = 1. When a disorder
    law is given the relative variance v_n is carried along as well.
    """
    n_max = n_max or settings.recursion.DEFAULT_LEVEL_CAP
    div_threshold = div_threshold or settings.recursion.DIVERGENCE_LOG_THRESHOLD
    if n_max < 1:
        raise ArgumentError(f"n_max must be >= 1, got {n_max}")
    if div_threshold <= 0:
        raise ArgumentError(f"div_threshold must be > 0, got {div_threshold}")

    g = gamma(disorder, params.beta) if disorder is not None else 0.0

    if params.h == 0.0:
        v_flat = _flat_variance(params, g, n_max) if disorder is not None else None
        zeros = np.zeros(n_max + 1)
        blown = v_flat is not None and not np.isfinite(v_flat[-1])
        return AnnealedTrace(
            params=params,
            log_r=zeros,
            p=zeros.copy(),
            v=v_flat,
            status=TraceStatus.FLAT,
            variance_blown_up=bool(blown),
        )

    tol = settings.recursion.FIXED_POINT_TOLERANCE
    log_rs: List[float] = [0.0]
    vs: List[float] = [0.0]
    status = TraceStatus.UNDETERMINED
    for _ in range(n_max):
        current = log_rs[-1]
        nxt = annealed_step(current, params)
        if disorder is not None:
            vs.append(variance_step(current, vs[-1], params, disorder, g))
        log_rs.append(nxt)
        if nxt > div_threshold:
            status = TraceStatus.DIVERGING
            break
        if abs(math.exp(nxt) - math.exp(current)) < tol:
            if nxt < 0.0:
                status = TraceStatus.CONVERGED_BELOW_ONE
                break
            # Above one, a fixed point exists only for b > s; for b <= s and
            # h > 0 the first increments may sit below tol yet r_n diverges
            if params.b > params.s:
                break

    log_r = np.asarray(log_rs)
    with np.errstate(over="ignore"):
        p = np.expm1(log_r)
    v = np.asarray(vs) if disorder is not None else None
    blown = v is not None and not np.all(np.isfinite(v))
    log.debug(
        f"annealed_iterate s={params.s} b={params.b} h={params.h}: "
        f"{status.value} after {log_r.size - 1} levels"
    )
    return AnnealedTrace(
        params=params,
        log_r=log_r,
        p=p,
        v=v,
        status=status,
        variance_blown_up=bool(blown),
    )


def _flat_variance(params: ModelParams, g: float, n_max: int) -> np.ndarray:
    vs = [0.0]
    for _ in range(n_max):
        vs.append(variance_step(0.0, vs[-1], params, None, g))
        if not math.isfinite(vs[-1]):
            break
    return np.asarray(vs)


def fixed_point_limit(params: ModelParams) -> float:
    """r_inf for h < 0 (the stable fixed point below one)."""
    if params.h >= 0:
        raise ArgumentError("the annealed limit below one exists only for h < 0")
    trace = annealed_iterate(params)
    return trace.final_r


def annealed_free_energy(params: ModelParams, rel_tol: float = 0.0) -> float:
    """F(0, h) = lim s^{-n} log r_n.

    Uses t_n = log r_n + h - log b/(s-1), for which s^{-n} t_n is nondecreasing
    and converges to F; iteration stops once two successive positive estimates
    agree to rel_tol.
    """
    rel_tol = rel_tol or settings.recursion.FREE_ENERGY_REL_TOL
    s, b, h = params.s, params.b, params.h
    if h <= 0.0:
        return 0.0

    offset = h - math.log(b) / (s - 1)
    log_r = 0.0
    previous = -math.inf
    scale = 1.0
    for _ in range(settings.recursion.FREE_ENERGY_LEVEL_CAP):
        nxt = annealed_step(log_r, params)
        if nxt == log_r:
            return 0.0
        log_r = nxt
        scale /= s
        estimate = scale * (log_r + offset)
        if not math.isfinite(estimate):
            return previous
        if estimate > 0.0 and previous > 0.0:
            if abs(estimate - previous) <= rel_tol * estimate:
                return estimate
        previous = estimate
    log.warning(f"annealed_free_energy: level cap reached for h={h}")
    return max(previous, 0.0)


def p_step(p: float, params: ModelParams) -> float:
    """p_{n+1} = ((1 + p_n)^s exp((s-1) h) - 1) / b."""
    s, b, h = params.s, params.b, params.h
    return math.expm1(s * math.log1p(p) + (s - 1) * h) / b


def p_lower_bound(n: int, params: ModelParams) -> float:
    """(s/b)^{n-1} h / b, valid for n >= 1 and h > 0."""
    s, b, h = params.s, params.b, params.h
    return (s / b) ** (n - 1) * h / b


def n1(params: ModelParams, cap: int = 0) -> int:
    """Smallest n with p_n >= 1."""
    cap = cap or settings.recursion.N1_CAP
    if params.h <= 0:
        raise ArgumentError(f"n1 needs h > 0 (p_n never reaches 1), got h={params.h}")
    p = 0.0
    for n in range(1, cap + 1):
        p = p_step(p, params)
        if p >= 1.0:
            return n
    raise CapExceededError(f"n1 exceeded the cap of {cap} levels (h={params.h})")


def n1_upper_bound(params: ModelParams) -> float:
    """2 + log(b/h)/log(s/b), implied by the growth lower bound on p_n."""
    s, b, h = params.s, params.b, params.h
    return 2.0 + math.log(b / h) / math.log(s / b)
