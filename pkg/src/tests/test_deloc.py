"""
Tests for the delocalization certificate and its extended-precision replay.
"""

import math

import pytest

from src.app.certificates.deloc import (
    REASON_A_THETA,
    REASON_U_BOUND,
    REASON_X_THETA,
    apply_strict,
    deloc_certify,
    plain_u_bound,
)
from src.app.certificates.holder import marginal_profile
from src.app.certificates.loc import loc_certify
from src.app.certificates.strict import replay_deloc
from src.app.models.certificates import DelocVerdict
from src.app.models.params import DisorderKind, DisorderModel, ModelParams
from src.app.utils.errors import ArgumentError

GAUSSIAN = DisorderModel()
BINARY = DisorderModel(kind=DisorderKind.BINARY_PM1)
STRONG = ModelParams(s=4, b=2.0, beta=3.0, h=0.0)
MARGINAL_THETAS = [0.8, 0.85, 0.9]
MARGINAL_ETAS = [0.2, 0.25, 0.3, 0.35, 0.4]


def test_plain_certificate_at_strong_disorder() -> None:
    cert = deloc_certify(STRONG, GAUSSIAN, 0.9)
    assert cert.certified
    assert cert.verdict is DelocVerdict.CERTIFIED_F_ZERO
    assert cert.witness_n == 1
    assert cert.profile is None
    assert cert.x_theta_value is not None
    assert cert.u_bound * (1.0 + cert.safety_margin) <= cert.x_theta_value
    assert cert.log_a_theta == pytest.approx(0.9 * -4.5 + (2.7**2) / 2.0)


def test_strict_replay_keeps_a_sound_certificate() -> None:
    cert = deloc_certify(STRONG, GAUSSIAN, 0.9, strict=True)
    assert cert.certified
    assert cert.strict_checked
    assert replay_deloc(cert, GAUSSIAN)


def test_strict_replay_rejects_a_tampered_certificate() -> None:
    cert = deloc_certify(STRONG, GAUSSIAN, 0.9)
    tampered = cert.model_copy(update={"params": STRONG.with_h(5.0)})
    rejected = apply_strict(tampered, GAUSSIAN)
    assert not rejected.certified
    assert rejected.strict_checked


def test_reason_a_theta() -> None:
    cert = deloc_certify(ModelParams(s=4, b=2.0, beta=0.5, h=1.0), GAUSSIAN, 0.8)
    assert not cert.certified
    assert cert.reason == REASON_A_THETA


def test_reason_x_theta() -> None:
    cert = deloc_certify(ModelParams(s=2, b=4.0, beta=1.0, h=0.0), GAUSSIAN, 0.5)
    assert cert.x_theta_value is None
    assert cert.reason == REASON_X_THETA


def test_reason_u_bound() -> None:
    cert = deloc_certify(ModelParams(s=4, b=2.0, beta=0.5, h=0.0), GAUSSIAN, 0.9)
    assert cert.reason == REASON_U_BOUND


def test_theta_range() -> None:
    with pytest.raises(ArgumentError):
        deloc_certify(STRONG, GAUSSIAN, 1.0)


def test_plain_u_bound_stops_at_the_target() -> None:
    a = math.exp(0.9 * -4.5 + 2.7**2 / 2.0)
    u, level = plain_u_bound(STRONG, 0.9, a, 0.99)
    assert level == 1
    assert u < 0.99


def test_marginal_profile_certifies_small_h() -> None:
    beta = 1.0
    certified = []
    for theta in MARGINAL_THETAS:
        for eta in MARGINAL_ETAS:
            n = round(1.0 / (eta * beta) ** 2)
            params = ModelParams(s=4, b=2.0, beta=beta, h=4.0**-n)
            cert = deloc_certify(params, GAUSSIAN, theta, marginal_profile(eta, n, 4))
            assert cert.holder_cost is not None
            assert cert.shifted_r_final is not None
            if cert.certified:
                certified.append(cert)
    assert certified
    cert = certified[0]
    assert cert.eta in MARGINAL_ETAS
    assert cert.witness_n == cert.profile.n  # type: ignore[union-attr]


def test_binary_disorder_uses_the_tilt_cost() -> None:
    params = ModelParams(s=4, b=2.0, beta=1.0, h=1e-12)
    cert = deloc_certify(params, BINARY, 0.85, marginal_profile(0.3, 11, 4))
    assert cert.holder_cost is not None
    assert cert.holder_cost > 1.0


def test_certified_f_zero_is_never_contradicted_by_loc() -> None:
    cert = deloc_certify(STRONG.with_h(0.01), GAUSSIAN, 0.9)
    assert cert.certified
    assert not loc_certify(STRONG.with_h(0.01), GAUSSIAN).certified
