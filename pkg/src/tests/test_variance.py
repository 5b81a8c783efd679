"""
Tests for the exact second-moment recursion.
"""

import math

import numpy as np
import pytest

from src.app.core.annealed import annealed_iterate, annealed_step
from src.app.core.variance import delta_step, variance_step
from src.app.models.params import DisorderModel, ModelParams
from src.app.montecarlo.oracles import exact_tree_samples
from src.app.utils.errors import ArgumentError

GAUSSIAN = DisorderModel()
SQRT2 = math.sqrt(2.0)


def test_first_level_value() -> None:
    params = ModelParams(s=2, b=SQRT2, beta=0.1)
    expected = math.expm1(0.01) / 2.0
    assert variance_step(0.0, 0.0, params, GAUSSIAN) == pytest.approx(
        expected, rel=1e-12
    )


def test_given_gamma_skips_the_disorder() -> None:
    params = ModelParams(s=2, b=SQRT2, beta=0.1)
    assert variance_step(0.0, 0.0, params, None, 0.01) == pytest.approx(
        variance_step(0.0, 0.0, params, GAUSSIAN), rel=1e-12
    )
    with pytest.raises(ArgumentError):
        variance_step(0.0, 0.0, params, None)


def test_invalid_and_saturated_inputs() -> None:
    params = ModelParams(s=4, b=2.0, beta=1.0, h=0.1)
    with pytest.raises(ArgumentError):
        variance_step(0.0, -1e-3, params, GAUSSIAN)
    with pytest.raises(ArgumentError):
        variance_step(0.0, math.nan, params, GAUSSIAN)
    assert variance_step(0.0, math.inf, params, GAUSSIAN) == math.inf
    assert variance_step(0.0, 0.0, params, None, 400.0) == math.inf


def test_relative_and_absolute_forms_agree() -> None:
    params = ModelParams(s=3, b=2.0, beta=0.4, h=0.05)
    log_r, v = 0.07, 0.2
    nxt_v = variance_step(log_r, v, params, GAUSSIAN)
    nxt_delta = delta_step(log_r, v * math.exp(2.0 * log_r), params, GAUSSIAN)
    nxt_log_r = annealed_step(log_r, params)
    assert nxt_delta * math.exp(-2.0 * nxt_log_r) == pytest.approx(nxt_v, rel=1e-12)


@pytest.mark.parametrize("b", [SQRT2, 2.0])
@pytest.mark.parametrize("beta", [0.1, 0.3])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_variance_matches_exact_tree_samples(b: float, beta: float, n: int) -> None:
    params = ModelParams(s=2, b=b, beta=beta)
    v = annealed_iterate(params, n_max=n, disorder=GAUSSIAN).v
    assert v is not None

    rng = np.random.default_rng(20240611 + n)
    r = np.exp(exact_tree_samples(params, GAUSSIAN, n, rng, 100_000))
    mean = float(np.mean(r))
    centered = r - mean
    var = float(np.mean(centered**2))
    # Standard error of the sample variance from the fourth central moment
    stderr = math.sqrt((float(np.mean(centered**4)) - var**2) / r.size)
    assert abs(var / mean**2 - v[n]) <= 4.0 * stderr / mean**2 + 1e-12
