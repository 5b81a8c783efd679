"""
Desk-scale reproduction of the scaling statements.

Tests marked slow take minutes; deselect them with -m "not slow".
"""

import math

import numpy as np
import pytest

from src.app.certificates.bracket import hc_bracket
from src.app.certificates.deloc import deloc_certify
from src.app.certificates.lemma22 import lemma22_scan
from src.app.certificates.loc import loc_certify
from src.app.certificates.optimizer import deloc_optimize
from src.app.core.annealed import (
    annealed_free_energy,
    annealed_iterate,
    annealed_step,
    fixed_point_limit,
)
from src.app.models.certificates import DelocSearchSpace, SearchFamily
from src.app.models.params import DisorderModel, ModelParams
from src.app.models.traces import TraceStatus
from src.app.montecarlo.estimators import estimate_free_energy, estimate_log_mean
from src.app.montecarlo.pool import pool_ensemble
from src.app.utils.fitting import fit_double_log, fit_power_law

GAUSSIAN = DisorderModel()
H_DECADES = list(np.logspace(-8, -3, 11))


@pytest.mark.parametrize("b,exponent", [(2.0, 2.0), (math.sqrt(2.0), 4.0 / 3.0)])
def test_annealed_free_energy_exponent(b: float, exponent: float) -> None:
    params = ModelParams(s=4, b=b)
    free = [annealed_free_energy(params.with_h(h)) for h in H_DECADES]
    fit = fit_power_law(H_DECADES, free)
    assert fit.exponent == pytest.approx(exponent, rel=0.05)
    assert fit.r_squared > 0.999


def test_trichotomy() -> None:
    flat = annealed_iterate(ModelParams(s=4, b=2.0, beta=0.7), n_max=50)
    assert flat.status is TraceStatus.FLAT
    assert np.all(flat.log_r == 0.0)
    assert annealed_free_energy(ModelParams(s=4, b=2.0)) == 0.0

    r_inf = fixed_point_limit(ModelParams(s=2, b=1.5, h=-0.5))
    assert r_inf == pytest.approx(0.3970929837, abs=1e-9)


def test_jensen_on_a_grid() -> None:
    for i, beta in enumerate([0.1, 0.3, 0.6, 1.0]):
        for j, h in enumerate([-0.1, 0.0, 0.05, 0.1, 0.2]):
            params = ModelParams(s=3, b=2.0, beta=beta, h=h)
            pools = pool_ensemble(
                params,
                GAUSSIAN,
                seed=99,
                size=2_000,
                level=5,
                replicas=4,
                stream=(i, j),
                chunk_size=500,
            )
            est = estimate_log_mean(pools)
            log_r = 0.0
            for _ in range(5):
                log_r = annealed_step(log_r, params)
            assert est.mean <= log_r + 3.0 * est.stderr + 1e-12


def test_lemma22_scan_over_default_grid() -> None:
    c5 = lemma22_scan(ModelParams(s=4, b=2.0), GAUSSIAN, [0.05, 0.1, 0.2, 0.3])
    assert c5 is not None


@pytest.mark.slow
def test_marginal_bracket_shapes() -> None:
    betas = [0.4, 0.5, 0.6, 0.8, 1.0]
    brackets = [
        hc_bracket(ModelParams(s=4, b=2.0, beta=beta), GAUSSIAN) for beta in betas
    ]
    lbs = [br.h_lb for br in brackets]
    ubs = [br.h_ub for br in brackets]
    assert all(lb is not None and lb > 0.0 for lb in lbs)
    assert all(ub is not None for ub in ubs)
    assert all(lb < ub for lb, ub in zip(lbs, ubs))

    lb_fit = fit_double_log(betas, lbs)
    ub_fit = fit_double_log(betas, ubs)
    assert -2.3 <= lb_fit.slope <= -1.7
    assert ub_fit.slope >= lb_fit.slope + 0.3


@pytest.mark.slow
def test_relevant_regime_homogeneous_lower_bound() -> None:
    space = DelocSearchSpace(families=[SearchFamily.HOMOGENEOUS])
    betas = [0.2, 0.3, 0.5, 0.7, 1.0]
    lbs = [
        deloc_optimize(ModelParams(s=4, b=1.3, beta=beta), GAUSSIAN, space).h_lb
        for beta in betas
    ]
    assert all(lb > 0.0 for lb in lbs)
    fit = fit_power_law(betas, lbs)
    assert 2.0 <= fit.exponent <= 3.2


@pytest.mark.slow
@pytest.mark.parametrize("h", [0.05, 0.1, 0.2])
def test_irrelevant_regime_between_shifted_and_pure_annealed(h: float) -> None:
    params = ModelParams(s=4, b=3.0, beta=0.2, h=h)
    estimates = []
    for level in (12, 16):
        pools = pool_ensemble(
            params, GAUSSIAN, seed=2024, size=100_000, level=level, replicas=16
        )
        estimates.append(estimate_free_energy(pools))
    coarse, fine = estimates

    # F(0, h - log M(beta)) <= F(beta, h) <= F(0, h)
    annealed = annealed_free_energy(params.with_beta(0.0))
    shifted = annealed_free_energy(ModelParams(s=4, b=3.0, h=h - 0.5 * 0.2**2))
    assert shifted - 3.0 * fine.stderr <= fine.mean <= annealed + 3.0 * fine.stderr
    assert fine.mean > 0.0
    assert abs(fine.mean - coarse.mean) <= 4.0 * math.hypot(fine.stderr, coarse.stderr)


def test_certified_delocalization_agrees_with_the_pool() -> None:
    params = ModelParams(s=4, b=2.0, beta=3.0, h=0.01)
    assert deloc_certify(params, GAUSSIAN, 0.9).certified
    pools = pool_ensemble(params, GAUSSIAN, seed=5, size=5_000, level=8, replicas=8)
    est = estimate_free_energy(pools)
    assert est.mean <= 3.0 * est.stderr + est.bias_scale


def test_certified_localization_agrees_with_the_pool() -> None:
    params = ModelParams(s=4, b=2.0, beta=0.5, h=1.0)
    assert loc_certify(params, GAUSSIAN).certified
    pools = pool_ensemble(params, GAUSSIAN, seed=6, size=5_000, level=8, replicas=8)
    est = estimate_free_energy(pools)
    assert est.mean >= 3.0 * est.stderr
