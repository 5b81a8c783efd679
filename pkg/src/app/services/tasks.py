"""
Per-point work of every sweep task.

Each task turns one grid point into a flat row of CSV cells plus an optional
audit payload (certificates, traces) for the JSON record.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from src.app.certificates.bracket import hc_bracket
from src.app.certificates.lemma22 import lemma22_check, lemma22_scan
from src.app.certificates.loc import loc_certify
from src.app.certificates.optimizer import best_at_h
from src.app.core.annealed import (
    annealed_free_energy,
    annealed_iterate,
    annealed_step,
    n1,
    n1_upper_bound,
)
from src.app.core.disorder import gamma
from src.app.core.lattice import (
    contact_terms,
    expected_contacts,
    expected_contacts_asymptotic,
    green_site,
)
from src.app.models.certificates import DelocCertificate
from src.app.models.params import ModelParams
from src.app.models.sweep import CellValue, PointResult, SweepSpec, SweepTask
from src.app.models.traces import RngLineage
from src.app.montecarlo.estimators import (
    estimate_fractional_moment,
    estimate_free_energy,
    estimate_log_mean,
)
from src.app.montecarlo.pool import pool_ensemble, run_pool
from src.app.services.checkpoint import checkpoint_pool
from src.app.utils.errors import ArgumentError, CapExceededError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPoint:
    index: int
    beta: Optional[float] = None
    h: Optional[float] = None
    # Lattice level, for the green task
    n: Optional[int] = None


@dataclass(frozen=True)
class TaskContext:
    """Quantities shared by every point of one sweep."""

    spec: SweepSpec
    out: Optional[Path] = None
    c5: Optional[float] = None


def grid_points(spec: SweepSpec) -> List[GridPoint]:
    """Grid order: beta outer, h inner; single-axis tasks use their own axis."""
    task = spec.task
    if task is SweepTask.GREEN:
        levels = range(1, spec.recursion_controls.green_levels + 1)
        return [GridPoint(i, n=n) for i, n in enumerate(levels)]
    if task is SweepTask.ANNEALED:
        return [GridPoint(i, h=h) for i, h in enumerate(spec.h_grid)]
    if task in (SweepTask.BRACKET, SweepTask.LEMMA22):
        return [GridPoint(i, beta=beta) for i, beta in enumerate(spec.beta_grid)]
    pairs = [(beta, h) for beta in spec.beta_grid for h in spec.h_grid]
    return [GridPoint(i, beta=beta, h=h) for i, (beta, h) in enumerate(pairs)]


def prepare_context(spec: SweepSpec, out: Optional[Path] = None) -> TaskContext:
    c5: Optional[float] = None
    if spec.task is SweepTask.LEMMA22:
        controls = spec.certificate_controls
        c5 = controls.c5
        if c5 is None:
            betas = [beta for beta in spec.beta_grid if beta > 0.0]
            params = ModelParams(s=spec.model.s, b=spec.model.b)
            c5 = lemma22_scan(params, spec.disorder, betas, controls.c5_grid)
            if c5 is None:
                c5 = max(controls.c5_grid)
                log.warning(f"no c5 in {controls.c5_grid} passes; reporting c5={c5}")
    return TaskContext(spec=spec, out=out, c5=c5)


def _params(spec: SweepSpec, point: GridPoint) -> ModelParams:
    return ModelParams(
        s=spec.model.s, b=spec.model.b, beta=point.beta or 0.0, h=point.h or 0.0
    )


def _base(point: GridPoint, params: ModelParams) -> Dict[str, CellValue]:
    return {"index": point.index, "s": params.s, "b": params.b}


def run_annealed(ctx: TaskContext, point: GridPoint) -> PointResult:
    controls = ctx.spec.recursion_controls
    params = _params(ctx.spec, point)
    trace = annealed_iterate(params, controls.n_max, controls.div_threshold)
    n1_value: Optional[int] = None
    exhausted = False
    if params.h > 0.0:
        try:
            n1_value = n1(params)
        except CapExceededError as e:
            log.warning(str(e))
            exhausted = True
    bound = n1_upper_bound(params) if params.h > 0.0 and params.b < params.s else None
    values = _base(point, params)
    values.update(
        h=params.h,
        free_energy=annealed_free_energy(params),
        n1=n1_value,
        n1_upper_bound=bound,
        status=trace.status.value,
        levels=trace.levels,
        final_log_r=trace.final_log_r,
    )
    return PointResult(
        index=point.index, h=params.h, values=values, budget_exhausted=exhausted
    )


def run_variance(ctx: TaskContext, point: GridPoint) -> PointResult:
    controls = ctx.spec.recursion_controls
    d = ctx.spec.disorder
    params = _params(ctx.spec, point)
    trace = annealed_iterate(params, controls.n_max, controls.div_threshold, d)
    assert trace.v is not None
    values = _base(point, params)
    values.update(
        beta=params.beta,
        h=params.h,
        gamma=gamma(d, params.beta),
        status=trace.variance_status.value,
        levels=trace.levels,
        final_log_r=trace.final_log_r,
        final_v=float(trace.v[-1]),
        variance_blown_up=trace.variance_blown_up,
    )
    return PointResult(index=point.index, beta=params.beta, h=params.h, values=values)


def run_mc(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    controls = spec.mc_controls
    assert spec.seed is not None
    params = _params(spec, point)
    pools = pool_ensemble(
        params,
        spec.disorder,
        spec.seed,
        size=controls.pool_size,
        level=controls.level,
        replicas=controls.replicas,
        stream=(point.index,),
        chunk_size=controls.chunk_size,
    )
    free = estimate_free_energy(pools)
    mean = estimate_log_mean(pools)
    log_r = 0.0
    for _ in range(controls.level):
        log_r = annealed_step(log_r, params)

    values = _base(point, params)
    values.update(
        beta=params.beta,
        h=params.h,
        level=controls.level,
        pool_size=controls.pool_size,
        replicas=controls.replicas,
        free_energy=free.mean,
        free_energy_stderr=free.stderr,
        bias_scale=free.bias_scale,
        log_mean=mean.mean,
        log_mean_stderr=mean.stderr,
        annealed_log_r=log_r,
        annealed_free_energy=annealed_free_energy(params),
    )
    if controls.theta is not None:
        moment = estimate_fractional_moment(pools, controls.theta)
        values.update(
            theta=controls.theta,
            fractional_moment=moment.mean,
            fractional_moment_stderr=moment.stderr,
        )
    if mean.mean > log_r + 3.0 * mean.stderr + 1e-12:
        log.warning(
            f"E log R_n above log r_n beyond 3 stderr at beta={params.beta} "
            f"h={params.h}: {mean.mean!r} > {log_r!r}"
        )
    return PointResult(index=point.index, beta=params.beta, h=params.h, values=values)


def deloc_cells(cert: Optional[DelocCertificate]) -> Dict[str, CellValue]:
    """Everything needed to re-check a delocalization verdict by hand."""
    if cert is None:
        return {
            "family": None,
            "theta": None,
            "eta": None,
            "n": None,
            "a_theta": None,
            "x_theta": None,
            "holder_cost": None,
            "shifted_r": None,
            "u_bound": None,
        }
    return {
        "family": cert.profile.kind.value if cert.profile else "plain",
        "theta": cert.theta,
        "eta": cert.eta,
        "n": cert.witness_n,
        "a_theta": cert.a_theta_value,
        "x_theta": cert.x_theta_value,
        "holder_cost": cert.holder_cost,
        "shifted_r": cert.shifted_r_final,
        "u_bound": cert.u_bound,
    }


def run_certify_deloc(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    controls = spec.certificate_controls
    params = _params(spec, point)
    cert, evaluations, exhausted = best_at_h(
        params, spec.disorder, controls.search, controls.n, controls.strict
    )
    values = _base(point, params)
    values.update(
        beta=params.beta,
        h=params.h,
        verdict=cert.verdict.value if cert else None,
        reason=cert.reason if cert else "no candidates",
    )
    values.update(deloc_cells(cert))
    values.update(
        safety_margin=cert.safety_margin if cert else None,
        strict_checked=cert.strict_checked if cert else False,
    )
    payload = {
        "certificate": cert.model_dump(mode="json") if cert else None,
        "evaluations": evaluations,
    }
    return PointResult(
        index=point.index,
        beta=params.beta,
        h=params.h,
        values=values,
        payload=payload,
        budget_exhausted=exhausted,
    )


def run_certify_loc(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    controls = spec.certificate_controls
    params = _params(spec, point)
    cert = loc_certify(
        params,
        spec.disorder,
        controls.split,
        spec.recursion_controls.n_max,
        strict=controls.strict,
    )
    values = _base(point, params)
    values.update(
        beta=params.beta,
        h=params.h,
        verdict=cert.verdict.value,
        reason=cert.reason,
        witness_n=cert.witness_n,
        log_r=cert.log_r_at_n,
        v=cert.v_at_n,
        elog_lower_bound=cert.elog_lower_bound,
        threshold=cert.threshold,
        split=cert.split,
        strict_checked=cert.strict_checked,
    )
    return PointResult(
        index=point.index,
        beta=params.beta,
        h=params.h,
        values=values,
        payload={"certificate": cert.model_dump(mode="json")},
    )


def run_bracket(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    controls = spec.certificate_controls
    params = _params(spec, point)
    bracket = hc_bracket(
        params, spec.disorder, controls.search, controls.strict, controls.split
    )
    ub = bracket.ub_certificate
    values = _base(point, params)
    values.update(
        beta=params.beta,
        h_lb=bracket.h_lb,
        h_ub=bracket.h_ub,
        lb_status=bracket.lb_status,
        ub_status=bracket.ub_status,
    )
    values.update(deloc_cells(bracket.lb_certificate))
    values.update(
        loc_witness_n=ub.witness_n if ub else None,
        loc_log_r=ub.log_r_at_n if ub else None,
        loc_v=ub.v_at_n if ub else None,
        loc_bound=ub.elog_lower_bound if ub else None,
        loc_threshold=ub.threshold if ub else None,
        monotonicity_violations=bracket.monotonicity_violations,
        lb_evaluations=bracket.lb_evaluations,
        ub_evaluations=bracket.ub_evaluations,
        budget_exhausted=bracket.budget_exhausted,
    )
    return PointResult(
        index=point.index,
        beta=params.beta,
        values=values,
        payload={"bracket": bracket.model_dump(mode="json")},
        budget_exhausted=bracket.budget_exhausted,
    )


def run_green(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    assert point.n is not None
    n = point.n
    params = _params(spec, point)
    s, b = params.s, params.b
    contacts = expected_contacts(n, params)
    values = _base(point, params)
    values.update(
        n=n,
        green_site=green_site(n, b),
        contact_term=contact_terms(n, params)[-1],
        expected_contacts=contacts,
        asymptotic_equivalent=(
            expected_contacts_asymptotic(n, params) if b < s else None
        ),
        scaled_by_sqrt_s_power=contacts / math.sqrt(s) ** n,
    )
    return PointResult(index=point.index, values=values)


def run_lemma22(ctx: TaskContext, point: GridPoint) -> PointResult:
    assert ctx.c5 is not None
    params = _params(ctx.spec, point)
    values = _base(point, params)
    if params.beta == 0.0:
        values.update(
            beta=0.0,
            c5=ctx.c5,
            h=None,
            n1=None,
            v_n1=None,
            passed=None,
            details="beta = 0 is outside the check",
        )
        return PointResult(index=point.index, beta=0.0, values=values)
    result = lemma22_check(params, ctx.spec.disorder, ctx.c5)
    values.update(
        beta=result.beta,
        c5=result.c5,
        h=result.h,
        n1=result.n1,
        v_n1=result.v_at_n1,
        passed=result.passed,
        details=result.details,
    )
    return PointResult(index=point.index, beta=result.beta, h=result.h, values=values)


def checkpoint_path(out: Optional[Path], index: int) -> Path:
    base = out if out is not None else Path("hierpin_run.csv")
    return base.with_name(f"{base.stem}.{index}.pool")


def run_checkpoint(ctx: TaskContext, point: GridPoint) -> PointResult:
    spec = ctx.spec
    controls = spec.mc_controls
    assert spec.seed is not None
    params = _params(spec, point)
    lineage = RngLineage(
        seed=spec.seed, stream=(point.index,), replica=0, chunk_size=controls.chunk_size
    )
    pool = run_pool(params, spec.disorder, controls.pool_size, controls.level, lineage)
    path = checkpoint_pool(pool, checkpoint_path(ctx.out, point.index))
    values = _base(point, params)
    values.update(
        beta=params.beta,
        h=params.h,
        level=pool.level,
        pool_size=pool.size,
        mean_log_r=float(np.mean(pool.log_samples)),
        path=str(path),
    )
    return PointResult(index=point.index, beta=params.beta, h=params.h, values=values)


TASK_RUNNERS: Dict[SweepTask, Callable[[TaskContext, GridPoint], PointResult]] = {
    SweepTask.ANNEALED: run_annealed,
    SweepTask.VARIANCE: run_variance,
    SweepTask.MC: run_mc,
    SweepTask.CERTIFY_DELOC: run_certify_deloc,
    SweepTask.CERTIFY_LOC: run_certify_loc,
    SweepTask.BRACKET: run_bracket,
    SweepTask.GREEN: run_green,
    SweepTask.LEMMA22: run_lemma22,
    SweepTask.CHECKPOINT: run_checkpoint,
}


def run_point(ctx: TaskContext, point: GridPoint) -> PointResult:
    runner = TASK_RUNNERS.get(ctx.spec.task)
    if runner is None:
        raise ArgumentError(f"unknown task {ctx.spec.task!r}")
    return runner(ctx, point)
