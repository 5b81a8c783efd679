"""
Strict mode: replay a winning inequality chain in extended precision.

Each replay builds its own mpmath context so concurrent callers never share
precision state.
"""

import logging
from typing import Any, List, Optional

from mpmath import MPContext

from src.app.config.settings import settings
from src.app.models.certificates import DelocCertificate, LocCertificate
from src.app.models.params import DisorderKind, DisorderModel

log = logging.getLogger(__name__)

_BISECTION_STEPS = 200
_X_THETA_BRACKET = 1e-9


def _context(digits: int) -> Any:
    ctx = MPContext()
    ctx.dps = digits or settings.certificates.STRICT_DIGITS
    return ctx


def _log_mgf(ctx: Any, d: DisorderModel, t: Any) -> Any:
    if d.kind is DisorderKind.GAUSSIAN:
        return t * t / 2
    if d.kind is DisorderKind.BINARY_PM1:
        return ctx.log(ctx.cosh(t))
    assert d.table_t is not None and d.table_log_m is not None
    ts: List[Any] = [ctx.mpf(x) for x in d.table_t]
    lms: List[Any] = [ctx.mpf(y) for y in d.table_log_m]
    for k in range(len(ts) - 1):
        if ts[k] <= t <= ts[k + 1]:
            w = (t - ts[k]) / (ts[k + 1] - ts[k])
            return lms[k] + w * (lms[k + 1] - lms[k])
    raise ValueError(f"t={t} outside the table grid")


def _log_step(ctx: Any, log_r: Any, s: int, b: Any, drift: Any) -> Any:
    z = (s - 1) * drift + s * log_r
    return ctx.log(ctx.exp(z) + b - 1) - ctx.log(b)


def _x_theta(ctx: Any, s: int, b: Any, theta: Any, x_float: float) -> Optional[Any]:
    """A point x <= x_theta with g_theta(x) <= x verified at working precision."""

    def excess(x: Any) -> Any:
        return (x**s + (b - 1) ** theta) / b**theta - x

    if x_float >= 1.0:
        return ctx.mpf(1) if excess(ctx.mpf(1)) <= 0 else None
    lo = ctx.mpf(max(0.0, x_float - _X_THETA_BRACKET))
    hi = ctx.mpf(min(1.0, x_float + _X_THETA_BRACKET))
    if excess(lo) > 0:
        return None
    if excess(hi) <= 0:
        return hi
    for _ in range(_BISECTION_STEPS):
        mid = (lo + hi) / 2
        if excess(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def replay_deloc(cert: DelocCertificate, d: DisorderModel, digits: int = 0) -> bool:
    """True if a_theta <= 1 and u_bound <= x_theta hold in extended precision."""
    if cert.x_theta_value is None:
        return False
    ctx = _context(digits)
    p = cert.params
    s = p.s
    b, beta, h = ctx.mpf(p.b), ctx.mpf(p.beta), ctx.mpf(p.h)
    theta = ctx.mpf(cert.theta)

    log_a = theta * (h - _log_mgf(ctx, d, beta)) + _log_mgf(ctx, d, theta * beta)
    if log_a > 0:
        return False
    x = _x_theta(ctx, s, b, theta, cert.x_theta_value)
    if x is None:
        return False

    if cert.profile is None:
        a = ctx.exp(log_a)
        u = ctx.mpf(1)
        for _ in range(cert.witness_n):
            u = (u**s * a ** (s - 1) + (b - 1) ** theta) / b**theta
    else:
        profile = cert.profile
        ratio = theta / (1 - theta)
        sizes = [(s - 1) * s ** (profile.n - 1 - i) for i in range(profile.n)]
        deltas = [ctx.mpf(x_) for x_ in profile.deltas]
        if d.kind is DisorderKind.GAUSSIAN:
            log_cost = theta / (2 * (1 - theta)) * ctx.fsum(
                size * dl * dl for size, dl in zip(sizes, deltas)
            )
        else:
            log_cost = (1 - theta) * ctx.fsum(
                size * (_log_mgf(ctx, d, ratio * dl) + ratio * _log_mgf(ctx, d, -dl))
                for size, dl in zip(sizes, deltas)
            )
        log_r = ctx.mpf(0)
        for dl in deltas:
            drift = (
                _log_mgf(ctx, d, beta - dl)
                - _log_mgf(ctx, d, beta)
                - _log_mgf(ctx, d, -dl)
                + h
            )
            log_r = _log_step(ctx, log_r, s, b, drift)
        u = ctx.exp(log_cost + theta * log_r)

    ok = bool(u <= x)
    log.debug(f"strict deloc replay theta={cert.theta}: u={u} x={x} ok={ok}")
    return ok


def replay_loc(cert: LocCertificate, d: DisorderModel, digits: int = 0) -> bool:
    """True if the Chebyshev energy bound beats the threshold in extended precision."""
    if cert.witness_n is None:
        return False
    ctx = _context(digits)
    p = cert.params
    s = p.s
    b, beta, h = ctx.mpf(p.b), ctx.mpf(p.beta), ctx.mpf(p.h)
    g = _log_mgf(ctx, d, 2 * beta) - 2 * _log_mgf(ctx, d, beta)

    log_r, v = ctx.mpf(0), ctx.mpf(0)
    for _ in range(cert.witness_n):
        z = s * log_r + (s - 1) * h
        growth = ctx.exp(s * ctx.log1p(v) + (s - 1) * g) - 1
        v = ctx.exp(2 * z) / (ctx.exp(z) + b - 1) ** 2 * growth
        log_r = _log_step(ctx, log_r, s, b, h)

    threshold = ctx.log(b) / (s - 1) + _log_mgf(ctx, d, beta) - h
    floor = ctx.log((b - 1) / b)
    t = ctx.mpf(cert.split)
    if v == 0:
        bound = log_r
    else:
        q = v / t**2
        shifted = log_r + ctx.log(1 - t)
        if q > 1 or shifted < floor:
            return False
        bound = (1 - q) * shifted + q * floor
    ok = bool(bound > threshold)
    log.debug(f"strict loc replay n={cert.witness_n}: bound={bound} ok={ok}")
    return ok
