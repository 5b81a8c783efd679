"""
Tests for the disorder laws, their MGFs and the parameter records.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.app.core.disorder import (
    check_normalization,
    gamma,
    log_mgf,
    normalization_moments,
    sample_omega,
)
from src.app.models.params import (
    DisorderKind,
    DisorderModel,
    ModelParams,
    Regime,
    regime,
    relevant_exponent,
)
from src.app.utils.errors import DomainError, UnsupportedSamplingError

GAUSSIAN = DisorderModel()
BINARY = DisorderModel(kind=DisorderKind.BINARY_PM1)
TABLE_T = [-2.0, -1.0, 0.0, 1.0, 2.0]
TABLE = DisorderModel(
    kind=DisorderKind.TABLE_MGF,
    table_t=TABLE_T,
    table_log_m=[t * t / 2.0 for t in TABLE_T],
)


def test_gaussian_log_mgf() -> None:
    assert log_mgf(GAUSSIAN, 0.0) == 0.0
    assert log_mgf(GAUSSIAN, 0.6) == pytest.approx(0.18, abs=1e-15)


def test_binary_log_mgf_is_log_cosh() -> None:
    assert log_mgf(BINARY, 1.0) == pytest.approx(0.4337808, abs=1e-7)
    assert log_mgf(BINARY, -1.0) == log_mgf(BINARY, 1.0)
    # No overflow where cosh itself would
    assert log_mgf(BINARY, 1000.0) == pytest.approx(1000.0 - math.log(2.0))


def test_gamma() -> None:
    assert gamma(GAUSSIAN, 0.3) == pytest.approx(0.09, abs=1e-15)
    assert gamma(GAUSSIAN, 0.0) == 0.0
    expected = math.log(math.cosh(0.6)) - 2.0 * math.log(math.cosh(0.3))
    assert gamma(BINARY, 0.3) == pytest.approx(expected, rel=1e-12)
    assert gamma(BINARY, 0.3) >= 0.0


def test_builtin_laws_are_normalized() -> None:
    assert check_normalization(GAUSSIAN)
    assert check_normalization(BINARY)
    mean, variance = normalization_moments(BINARY)
    assert abs(mean) < 1e-12
    assert variance == pytest.approx(1.0, abs=1e-6)


def test_table_interpolates_and_has_a_domain() -> None:
    assert log_mgf(TABLE, 1.0) == pytest.approx(0.5)
    assert log_mgf(TABLE, 1.5) == pytest.approx((0.5 + 2.0) / 2.0)
    assert TABLE.domain == (-2.0, 2.0)
    with pytest.raises(DomainError, match="2.5"):
        log_mgf(TABLE, 2.5)
    with pytest.raises(DomainError):
        gamma(TABLE, 1.5)


def test_invalid_tables_are_rejected() -> None:
    with pytest.raises(ValidationError):
        DisorderModel(kind=DisorderKind.TABLE_MGF, table_t=TABLE_T)
    with pytest.raises(ValidationError, match="convex"):
        DisorderModel(
            kind=DisorderKind.TABLE_MGF,
            table_t=TABLE_T,
            table_log_m=[0.8, 0.5, 0.0, 0.5, 0.8],
        )
    with pytest.raises(ValidationError, match="symmetric"):
        DisorderModel(
            kind=DisorderKind.TABLE_MGF,
            table_t=[-2.0, -1.0, 0.0, 1.0, 3.0],
            table_log_m=[2.0, 0.5, 0.0, 0.5, 4.5],
        )


def test_sampling() -> None:
    rng = np.random.default_rng(7)
    omega = sample_omega(BINARY, rng, 1000)
    assert set(np.unique(omega)) <= {-1.0, 1.0}
    assert sample_omega(GAUSSIAN, rng, (3, 4)).shape == (3, 4)
    assert not TABLE.can_sample
    with pytest.raises(UnsupportedSamplingError):
        sample_omega(TABLE, rng, 10)


def test_params_validation() -> None:
    with pytest.raises(ValidationError):
        ModelParams(s=1, b=2.0)
    with pytest.raises(ValidationError):
        ModelParams(s=2, b=1.0)
    with pytest.raises(ValidationError):
        ModelParams(s=2, b=2.0, beta=-0.1)
    p = ModelParams(s=4, b=2.0, beta=0.5)
    assert p.with_h(0.1).h == 0.1
    assert p.with_h(0.1).beta == 0.5
    assert p.alpha == pytest.approx(0.5)


def test_regimes() -> None:
    assert regime(2.0, 4) is Regime.MARGINAL
    assert regime(math.sqrt(2.0), 2) is Regime.MARGINAL
    assert regime(1.3, 4) is Regime.RELEVANT
    assert regime(3.0, 4) is Regime.IRRELEVANT
    assert regime(4.0, 4) is Regime.ALPHA_ZERO
    assert ModelParams(s=4, b=2.0).is_marginal


def test_relevant_exponent() -> None:
    exponent = relevant_exponent(ModelParams(s=4, b=1.3))
    assert exponent == pytest.approx(2.609, abs=1e-3)
    assert relevant_exponent(ModelParams(s=4, b=2.0)) is None
