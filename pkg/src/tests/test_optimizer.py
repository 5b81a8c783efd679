"""
Tests for the delocalization search: bisection, candidate grid, budget and
tie-breaking.
"""

import math

import pytest

from src.app.certificates.optimizer import (
    Candidate,
    DelocOptimizer,
    best_at_h,
    build_profile,
    coupled_rank,
    deloc_optimize,
    grid_candidates,
    log_h_ceiling,
    max_certified,
)
from src.app.certificates.search import bisect_predicate
from src.app.models.certificates import DelocSearchSpace, SearchFamily, ShiftKind
from src.app.models.params import DisorderModel, ModelParams

GAUSSIAN = DisorderModel()
MARGINAL = ModelParams(s=4, b=2.0, beta=1.0)
SPACE = DelocSearchSpace(
    thetas=[0.8, 0.85, 0.9],
    etas=[0.2, 0.25, 0.3, 0.35, 0.4],
    n_multipliers=[1.0],
    families=[SearchFamily.MARGINAL],
    refine=False,
)


def test_bisect_predicate() -> None:
    result = bisect_predicate(lambda x: x <= -3.0, -10.0, 0.0, 1e-6, 100)
    assert result.converged
    assert result.good <= -3.0 < result.bad
    assert result.bad - result.good <= math.log1p(1e-6)

    capped = bisect_predicate(lambda x: x <= -3.0, -10.0, 0.0, 1e-6, 3)
    assert not capped.converged
    assert capped.steps == 3


def test_grid_candidates() -> None:
    cands = grid_candidates(MARGINAL, SPACE)
    assert len(cands) == 15
    assert Candidate(SearchFamily.MARGINAL, 0.9, 0.2, 25) in cands
    assert len(set(cands)) == len(cands)


def test_build_profile() -> None:
    marginal = build_profile(Candidate(SearchFamily.MARGINAL, 0.9, 0.3, 11), 4)
    assert marginal is not None and marginal.kind is ShiftKind.MARGINAL
    homogeneous = build_profile(Candidate(SearchFamily.HOMOGENEOUS, 0.9, 0.3, 4), 4)
    assert homogeneous is not None
    assert homogeneous.deltas[0] == pytest.approx(0.3 * 4**-2)
    assert build_profile(Candidate(SearchFamily.PLAIN, 0.9), 4) is None


def test_log_h_ceiling() -> None:
    # log M(1) - log M(theta)/theta = 1/2 - theta/2
    assert log_h_ceiling(MARGINAL, GAUSSIAN, 0.8) == pytest.approx(math.log(0.1))


def test_zero_beta_gives_zero_lower_bound() -> None:
    result = deloc_optimize(MARGINAL.with_beta(0.0), GAUSSIAN, SPACE)
    assert result.h_lb == 0.0
    assert result.certificate is None
    assert result.reason is not None


def test_marginal_search_certifies_a_positive_h() -> None:
    result = deloc_optimize(MARGINAL, GAUSSIAN, SPACE)
    assert result.certificate is not None
    assert result.certificate.certified
    assert result.h_lb == result.certificate.params.h
    assert result.h_lb > 0.0
    assert result.evaluations == 15
    assert not result.budget_exhausted

    again = deloc_optimize(MARGINAL, GAUSSIAN, SPACE)
    assert again.h_lb == result.h_lb
    assert again.certificate == result.certificate


def test_budget_exhaustion_is_reported() -> None:
    space = SPACE.model_copy(update={"max_evaluations": 2})
    result = deloc_optimize(MARGINAL, GAUSSIAN, space)
    assert result.budget_exhausted
    assert result.evaluations == 2


def test_best_at_fixed_h() -> None:
    cert, evaluations, exhausted = best_at_h(MARGINAL.with_h(1e-30), GAUSSIAN, SPACE)
    assert cert is not None and cert.certified
    assert evaluations == 15
    assert not exhausted

    pinned, _, _ = best_at_h(MARGINAL.with_h(1e-30), GAUSSIAN, SPACE, n=3)
    assert pinned is not None
    assert pinned.witness_n == 3


def test_best_at_fixed_h_strict() -> None:
    cert, _, _ = best_at_h(MARGINAL.with_h(1e-30), GAUSSIAN, SPACE, strict=True)
    assert cert is not None
    assert cert.strict_checked


def test_coupled_rank() -> None:
    assert coupled_rank(0.2, 1.0, 1.0, 2000) == 25
    assert coupled_rank(0.4, 1.0, 2.0, 2000) == 12
    assert coupled_rank(0.05, 0.4, 1.0, 2000) == 2000
    assert coupled_rank(5.0, 1.0, 1.0, 2000) == 1


def test_homogeneous_candidates_take_the_rank_grid() -> None:
    space = DelocSearchSpace(
        thetas=[0.9],
        etas=[0.3],
        ranks=[1, 2, 3, 5000],
        families=[SearchFamily.HOMOGENEOUS],
        refine=False,
    )
    cands = grid_candidates(MARGINAL, space)
    assert [c.n for c in cands] == [1, 2, 3]
    assert all(c.eta == 0.3 for c in cands)


def test_marginal_refinement_keeps_the_rank_coupled() -> None:
    space = SPACE.model_copy(update={"refine": True})
    opt = DelocOptimizer(MARGINAL, GAUSSIAN, space)
    assert opt.run_grid()
    opt.refine()
    assert len(opt.results) > 15
    for cand in opt.results:
        assert cand.n == coupled_rank(cand.eta, MARGINAL.beta, cand.mult, space.n_cap)


def test_marginal_candidate_past_the_float_range() -> None:
    params = ModelParams(s=4, b=2.0, beta=0.4)
    cand = Candidate(SearchFamily.MARGINAL, 0.75, 0.05, 625)
    cert = max_certified(params, GAUSSIAN, cand, DelocSearchSpace())
    if cert is not None:
        assert cert.certified
        assert cert.profile is not None and cert.profile.n == 625


@pytest.mark.slow
def test_default_space_at_small_beta() -> None:
    result = deloc_optimize(ModelParams(s=4, b=2.0, beta=0.4), GAUSSIAN)
    assert result.certificate is not None
    assert result.h_lb > 0.0
