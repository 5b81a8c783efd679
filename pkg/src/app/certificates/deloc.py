"""
Delocalization certificate.

If a_theta = E[A^theta] <= 1 and some level n has E[R_n^theta] <= x_theta, the
fractional moments stay below x_theta forever and F(beta, h) = 0. The bound
on E[R_n^theta] comes either from the plain recursion
u_{i+1} <= (u_i^s a_theta^{s-1} + (b-1)^theta)/b^theta, or from a shifted
environment: u_n <= cost * tilde r_n^theta.
"""

import logging
import math
from typing import Optional, Tuple

from src.app.certificates.holder import log_holder_cost_gaussian, log_holder_cost_tilt
from src.app.certificates.shifted import shifted_log_r
from src.app.certificates.strict import replay_deloc
from src.app.config.settings import settings
from src.app.core.fractional import fractional_step, log_a_theta, x_theta
from src.app.models.certificates import DelocCertificate, DelocVerdict, ShiftProfile
from src.app.models.params import DisorderKind, DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError

log = logging.getLogger(__name__)

REASON_A_THETA = "a_theta > 1"
REASON_X_THETA = "x_theta undefined"
REASON_U_BOUND = "u_bound > x_theta"
REASON_STRICT = "strict re-evaluation failed"


def plain_u_bound(
    params: ModelParams,
    theta: float,
    a: float,
    target: Optional[float],
    level_cap: int = 0,
) -> Tuple[float, int]:
    """Smallest u_n of the plain recursion and its level.

    Stops at the first level with u_n <= target (absorbing), when u stalls, or
    when it overflows.
    """
    level_cap = level_cap or settings.certificates.PLAIN_LEVEL_CAP
    s, b = params.s, params.b
    u = 1.0
    best, best_n = u, 0
    for n in range(1, level_cap + 1):
        try:
            nxt = fractional_step(u, a, s, b, theta)
        except OverflowError:
            break
        if nxt < best:
            best, best_n = nxt, n
        if target is not None and nxt <= target:
            break
        if nxt == u or math.isinf(nxt):
            break
        u = nxt
    return best, best_n


def deloc_certify(
    params: ModelParams,
    d: DisorderModel,
    theta: float,
    profile: Optional[ShiftProfile] = None,
    strict: bool = False,
    safety_margin: float = 0.0,
) -> DelocCertificate:
    """Check the fractional-moment criterion at (beta, h) for one theta."""
    if not 0.0 < theta < 1.0:
        raise ArgumentError(f"theta must lie in (0, 1), got {theta!r}")
    safety_margin = safety_margin or settings.certificates.DELOC_SAFETY_MARGIN

    la = log_a_theta(d, params.beta, params.h, theta)
    xt = x_theta(params.s, params.b, theta)

    cost: Optional[float] = None
    r_tilde: Optional[float] = None
    if profile is None:
        u_bound, witness = plain_u_bound(params, theta, math.exp(min(la, 700.0)), xt)
    else:
        if d.kind is DisorderKind.GAUSSIAN:
            log_cost = log_holder_cost_gaussian(profile, theta)
        else:
            log_cost = log_holder_cost_tilt(d, profile, theta)
        log_r = shifted_log_r(params, d, profile)
        log_u = log_cost + theta * log_r
        cost = math.exp(min(log_cost, 709.0))
        r_tilde = math.exp(min(log_r, 709.0))
        u_bound = math.exp(min(log_u, 709.0))
        witness = profile.n

    if la > 0.0:
        verdict, reason = DelocVerdict.INCONCLUSIVE, REASON_A_THETA
    elif xt is None:
        verdict, reason = DelocVerdict.INCONCLUSIVE, REASON_X_THETA
    elif u_bound * (1.0 + safety_margin) > xt:
        verdict, reason = DelocVerdict.INCONCLUSIVE, REASON_U_BOUND
    else:
        verdict, reason = DelocVerdict.CERTIFIED_F_ZERO, None

    cert = DelocCertificate(
        params=params,
        theta=theta,
        profile=profile,
        log_a_theta=la,
        a_theta_value=math.exp(min(la, 709.0)),
        x_theta_value=xt,
        holder_cost=cost,
        shifted_r_final=r_tilde,
        u_bound=u_bound,
        witness_n=witness,
        safety_margin=safety_margin,
        verdict=verdict,
        reason=reason,
    )
    if strict and cert.certified:
        cert = apply_strict(cert, d)
    return cert


def apply_strict(cert: DelocCertificate, d: DisorderModel) -> DelocCertificate:
    """Keep a Certified verdict only if it survives the extended-precision replay."""
    if replay_deloc(cert, d):
        return cert.model_copy(update={"strict_checked": True})
    log.warning(
        f"strict replay rejected deloc certificate at beta={cert.params.beta} "
        f"h={cert.params.h} theta={cert.theta}"
    )
    return cert.model_copy(
        update={
            "verdict": DelocVerdict.INCONCLUSIVE,
            "reason": REASON_STRICT,
            "strict_checked": True,
        }
    )
