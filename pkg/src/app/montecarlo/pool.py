"""
Pool (population) dynamics for the quenched recursion

    R_{n+1} = (prod_{j<=s} R_n^(j) prod_{j<s} A_j + b - 1) / b,
    A = exp(beta omega - log M(beta) + h),

carried entirely in log domain.
"""

import logging
import math
from concurrent.futures import Executor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.app.config.settings import settings
from src.app.core.annealed import LOG1P_SWITCH
from src.app.core.disorder import log_mgf, sample_omega
from src.app.models.params import DisorderModel, ModelParams
from src.app.models.traces import Pool, RngLineage
from src.app.montecarlo.rng import chunk_generator
from src.app.utils.errors import ArgumentError, UnsupportedSamplingError

log = logging.getLogger(__name__)


def sample_log_A(
    d: DisorderModel,
    beta: float,
    h: float,
    rng: np.random.Generator,
    size: Optional[Union[int, Tuple[int, ...]]] = None,
) -> Union[float, np.ndarray]:
    """Draw beta omega - log M(beta) + h (one value, or an array of `size`)."""
    if not d.can_sample:
        raise UnsupportedSamplingError(
            f"{d.kind.value} disorder has no sampler; it is usable by certificates only"
        )
    shift = h - log_mgf(d, beta)
    if beta == 0.0:
        return h if size is None else np.full(size, h)
    if size is None:
        return float(beta * sample_omega(d, rng, 1)[0] + shift)
    return beta * sample_omega(d, rng, size) + shift


def combine_log(log_r_rows: np.ndarray, log_a_rows: np.ndarray, b: float) -> np.ndarray:
    """One recursion step on rows of s log R values and s-1 log A values.

    Same arithmetic as the scalar annealed step: log1p(expm1(x)/b), switching
    to logaddexp where expm1 would overflow.
    """
    x = log_r_rows.sum(axis=-1) + log_a_rows.sum(axis=-1)
    small = np.log1p(np.expm1(np.minimum(x, LOG1P_SWITCH)) / b)
    large = np.logaddexp(x, math.log(b - 1.0)) - math.log(b)
    return np.where(x < LOG1P_SWITCH, small, large)


def floor_value(b: float) -> float:
    """log((b-1)/b), the lower bound of every log R_n with n >= 1."""
    return float(np.log1p(-1.0 / b))


def _step_chunk(
    log_samples: np.ndarray,
    params: ModelParams,
    d: DisorderModel,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    s = params.s
    idx = rng.integers(0, log_samples.size, size=(count, s))
    log_a = sample_log_A(d, params.beta, params.h, rng, size=(count, s - 1))
    return combine_log(log_samples[idx], np.asarray(log_a), params.b)


def pool_step(
    pool: Pool,
    rng: Optional[np.random.Generator] = None,
    executor: Optional[Executor] = None,
) -> Pool:
    """Advance a pool by one level.

    With an explicit `rng` every draw comes from that generator. Otherwise the
    pool's lineage supplies one substream per output chunk, and chunks may run
    on `executor`; the result is identical either way.
    """
    if pool.size == 0:
        raise ArgumentError("cannot step an empty pool")
    size = pool.size
    level = pool.level + 1

    if rng is not None:
        out = _step_chunk(pool.log_samples, pool.params, pool.disorder, rng, size)
        return Pool(
            level, out, pool.params, pool.disorder, pool.lineage, dict(pool.meta)
        )

    if pool.lineage is None:
        raise ArgumentError("pool_step needs an rng or a pool with an RNG lineage")
    lineage = pool.lineage
    chunk = lineage.chunk_size
    n_chunks = -(-size // chunk)
    out = np.empty(size)

    def run(k: int) -> None:
        lo, hi = k * chunk, min((k + 1) * chunk, size)
        gen = chunk_generator(lineage, level, k)
        out[lo:hi] = _step_chunk(
            pool.log_samples, pool.params, pool.disorder, gen, hi - lo
        )

    if executor is None or n_chunks == 1:
        for k in range(n_chunks):
            run(k)
    else:
        # Consume the iterator so worker exceptions propagate
        list(executor.map(run, range(n_chunks)))

    return Pool(level, out, pool.params, pool.disorder, lineage, dict(pool.meta))


def initial_pool(
    params: ModelParams,
    d: DisorderModel,
    size: int,
    lineage: Optional[RngLineage] = None,
) -> Pool:
    """Level-0 pool, identically 0 (R_0 = 1)."""
    if size < 1:
        raise ArgumentError(f"pool size must be >= 1, got {size}")
    return Pool(0, np.zeros(size), params, d, lineage)


def run_pool(
    params: ModelParams,
    d: DisorderModel,
    size: int,
    level: int,
    lineage: RngLineage,
    executor: Optional[Executor] = None,
) -> Pool:
    """Propagate a level-0 pool of `size` samples up to `level`."""
    if level < 0:
        raise ArgumentError(f"level must be >= 0, got {level}")
    pool = initial_pool(params, d, size, lineage)
    for _ in range(level):
        pool = pool_step(pool, executor=executor)
    log.debug(
        f"run_pool beta={params.beta} h={params.h} replica={lineage.replica}: "
        f"level {level}, mean log R = {float(np.mean(pool.log_samples)):.6g}"
    )
    return pool


def pool_ensemble(
    params: ModelParams,
    d: DisorderModel,
    seed: int,
    size: int = 0,
    level: int = 0,
    replicas: int = 0,
    stream: Sequence[int] = (),
    chunk_size: int = 0,
    executor: Optional[Executor] = None,
) -> List[Pool]:
    """Independent replicas; replica r uses the substream stream + (r,)."""
    mc = settings.monte_carlo
    size = size or mc.DEFAULT_POOL_SIZE
    level = level or mc.DEFAULT_LEVEL
    replicas = replicas or mc.DEFAULT_REPLICAS
    chunk_size = chunk_size or mc.DEFAULT_CHUNK_SIZE
    return [
        run_pool(
            params,
            d,
            size,
            level,
            RngLineage(
                seed=seed, stream=tuple(stream), replica=r, chunk_size=chunk_size
            ),
            executor,
        )
        for r in range(replicas)
    ]
