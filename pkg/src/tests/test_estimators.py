"""
Tests for the replica estimators.
"""

import math

import numpy as np
import pytest

from src.app.core.fractional import a_theta, fractional_trace
from src.app.models.params import DisorderModel, ModelParams
from src.app.models.traces import Pool
from src.app.montecarlo.estimators import (
    estimate_fractional_moment,
    estimate_free_energy,
    estimate_log_mean,
)
from src.app.montecarlo.pool import pool_ensemble
from src.app.utils.errors import ArgumentError

PARAMS = ModelParams(s=4, b=2.0, beta=0.5)
GAUSSIAN = DisorderModel()


def _pool(values: list, level: int = 2) -> Pool:
    return Pool(level, np.asarray(values, dtype=float), PARAMS, GAUSSIAN)


def test_needs_two_replicas_at_one_level() -> None:
    with pytest.raises(ArgumentError):
        estimate_log_mean([_pool([0.0, 1.0])])
    with pytest.raises(ArgumentError):
        estimate_log_mean([_pool([0.0]), _pool([0.0], level=3)])


def test_log_mean_and_free_energy() -> None:
    pools = [_pool([1.0, 3.0]), _pool([2.0, 4.0])]
    est = estimate_log_mean(pools)
    assert est.mean == pytest.approx(2.5)
    assert est.stderr == pytest.approx(0.5)
    assert est.n_samples == 2

    free = estimate_free_energy(pools)
    assert free.mean == pytest.approx(2.5 / 16.0)
    assert free.bias_scale == pytest.approx(1.0 / 16.0)
    assert free.level == 2


def test_identical_replicas_have_zero_stderr() -> None:
    pools = [_pool([0.5, 0.5]), _pool([0.5, 0.5])]
    assert estimate_log_mean(pools).stderr == 0.0


def test_fractional_moment() -> None:
    pools = [_pool([0.0, math.log(4.0)]), _pool([math.log(4.0), 0.0])]
    est = estimate_fractional_moment(pools, 0.5)
    assert est.mean == pytest.approx(1.5)
    with pytest.raises(ArgumentError):
        estimate_fractional_moment(pools, 0.0)


@pytest.mark.parametrize("beta, h", [(0.8, 0.0), (1.5, 0.05), (2.0, 0.15)])
def test_sampled_fractional_moment_below_u_recursion(beta: float, h: float) -> None:
    n, theta = 6, 0.9
    params = ModelParams(s=4, b=2.0, beta=beta, h=h)
    a = a_theta(GAUSSIAN, beta, h, theta)
    assert a <= 1.0
    pools = pool_ensemble(params, GAUSSIAN, 11, size=5_000, level=n, replicas=8)
    est = estimate_fractional_moment(pools, theta)
    u = fractional_trace(4, 2.0, theta, a, n)
    assert est.mean <= float(u[n]) + 3.0 * est.stderr
