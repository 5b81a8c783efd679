"""
Tests for the independent oracles: path enumeration, fixed-environment
evaluation and exact tree sampling.
"""

import math

import numpy as np
import pytest

from src.app.core.annealed import annealed_iterate
from src.app.models.params import DisorderModel, ModelParams
from src.app.montecarlo.oracles import (
    enumerate_paths_partition,
    evaluate_recursion,
    exact_tree_sample,
    exact_tree_samples,
)
from src.app.utils.errors import ArgumentError, SizeGuardError

GAUSSIAN = DisorderModel()


@pytest.mark.parametrize("b", [2, 3])
@pytest.mark.parametrize("n", [1, 2])
def test_enumeration_matches_recursion(b: int, n: int) -> None:
    s = 2
    params = ModelParams(s=s, b=float(b), beta=0.7, h=0.1)
    rng = np.random.default_rng(1000 * b + n)
    for _ in range(100):
        omega = rng.standard_normal(s**n - 1)
        by_paths = enumerate_paths_partition(n, s, b, omega, params, GAUSSIAN)
        by_recursion = math.exp(evaluate_recursion(params, GAUSSIAN, n, omega))
        assert by_paths == pytest.approx(by_recursion, rel=1e-12)


def test_enumeration_for_s_three() -> None:
    params = ModelParams(s=3, b=2.0, beta=0.4, h=-0.2)
    omega = np.random.default_rng(5).standard_normal(8)
    assert enumerate_paths_partition(2, 3, 2, omega, params, GAUSSIAN) == pytest.approx(
        math.exp(evaluate_recursion(params, GAUSSIAN, 2, omega)), rel=1e-12
    )


def test_single_level_by_hand() -> None:
    params = ModelParams(s=2, b=2.0, beta=1.0, h=0.0)
    omega = np.array([0.3])
    weight = math.exp(0.3 - 0.5)
    assert math.exp(evaluate_recursion(params, GAUSSIAN, 1, omega)) == pytest.approx(
        (weight + 1.0) / 2.0
    )


def test_oracle_guards() -> None:
    params = ModelParams(s=2, b=2.5)
    with pytest.raises(ArgumentError):
        enumerate_paths_partition(
            1, 2, 2.5, np.zeros(1), params, GAUSSIAN  # type: ignore[arg-type]
        )
    params = ModelParams(s=2, b=2.0)
    with pytest.raises(SizeGuardError):
        enumerate_paths_partition(3, 2, 2, np.zeros(7), params, GAUSSIAN)
    with pytest.raises(ArgumentError):
        evaluate_recursion(params, GAUSSIAN, 2, np.zeros(2))
    with pytest.raises(SizeGuardError):
        exact_tree_samples(
            ModelParams(s=4, b=2.0), GAUSSIAN, 12, np.random.default_rng(0), 1
        )
    with pytest.raises(ArgumentError):
        exact_tree_samples(params, GAUSSIAN, 2, np.random.default_rng(0), 0)


@pytest.mark.parametrize("n", [1, 4, 8])
def test_exact_tree_mean_matches_annealed(n: int) -> None:
    params = ModelParams(s=2, b=2.0, beta=0.3, h=0.05)
    rng = np.random.default_rng(77 + n)
    r = np.exp(exact_tree_samples(params, GAUSSIAN, n, rng, 20_000))
    stderr = float(np.std(r, ddof=1)) / math.sqrt(r.size)
    expected = annealed_iterate(params, n_max=n).final_r
    assert abs(float(np.mean(r)) - expected) <= 4.0 * stderr


def test_exact_tree_sample_at_level_zero() -> None:
    params = ModelParams(s=2, b=2.0, beta=0.3)
    assert exact_tree_sample(params, GAUSSIAN, 0, np.random.default_rng(0)) == 0.0
