"""
Independent oracles for the quenched recursion.

* exact_tree_samples: expands the recursion with fully independent sub-samples
  (cost s^n per draw), free of pool resampling correlations.
* evaluate_recursion: R_n for one fixed environment omega_1..omega_{s^n - 1},
  with site t carrying omega[t - 1] and level set V_i consumed at step i -> i+1.
* enumerate_paths_partition: the same R_n by brute force over directed paths.
"""

import itertools
import math
from typing import List, Tuple

import numpy as np

from src.app.config.settings import settings
from src.app.core.disorder import log_mgf
from src.app.models.params import DisorderModel, ModelParams
from src.app.montecarlo.pool import combine_log, sample_log_A
from src.app.utils.errors import ArgumentError, SizeGuardError


def _check_tree_size(s: int, n: int) -> int:
    leaves = s**n
    if leaves > settings.monte_carlo.EXACT_TREE_LEAF_GUARD:
        raise SizeGuardError(
            f"exact tree with s^n = {leaves} leaves exceeds the guard "
            f"{settings.monte_carlo.EXACT_TREE_LEAF_GUARD}"
        )
    return leaves


def _tree_batch(
    params: ModelParams,
    d: DisorderModel,
    n: int,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    s = params.s
    width = s ** (n - 1) if n >= 1 else 1
    values = np.zeros((count, width * s))
    for level in range(n):
        blocks = s ** (n - 1 - level)
        rows = values.reshape(count, blocks, s)
        log_a = np.asarray(
            sample_log_A(d, params.beta, params.h, rng, size=(count, blocks, s - 1))
        )
        values = combine_log(rows, log_a, params.b)
    return values.reshape(count, -1)[:, 0] if n >= 1 else np.zeros(count)


def exact_tree_samples(
    params: ModelParams,
    d: DisorderModel,
    n: int,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """`size` independent exact draws of log R_n."""
    if n < 0 or size < 1:
        raise ArgumentError(f"need n >= 0 and size >= 1, got n={n}, size={size}")
    leaves = _check_tree_size(params.s, n)
    per_batch = max(1, settings.monte_carlo.EXACT_TREE_BATCH_LEAVES // leaves)
    parts: List[np.ndarray] = []
    done = 0
    while done < size:
        count = min(per_batch, size - done)
        parts.append(_tree_batch(params, d, n, rng, count))
        done += count
    return np.concatenate(parts)


def exact_tree_sample(
    params: ModelParams, d: DisorderModel, n: int, rng: np.random.Generator
) -> float:
    """One exact draw of log R_n."""
    return float(exact_tree_samples(params, d, n, rng, 1)[0])


def _site_log_weights(
    params: ModelParams, d: DisorderModel, omega: np.ndarray
) -> np.ndarray:
    return params.beta * omega - log_mgf(d, params.beta) + params.h


def _check_environment(s: int, n: int, omega: np.ndarray) -> None:
    if omega.shape != (s**n - 1,):
        raise ArgumentError(
            f"environment must hold s^n - 1 = {s**n - 1} values, "
            f"got shape {omega.shape}"
        )


def evaluate_recursion(
    params: ModelParams, d: DisorderModel, n: int, omega: np.ndarray
) -> float:
    """log R_n of the fixed environment omega."""
    s = params.s
    omega = np.asarray(omega, dtype=float)
    _check_environment(s, n, omega)
    log_w = _site_log_weights(params, d, omega)

    values = np.zeros(s**n)
    for level in range(n):
        blocks = s ** (n - 1 - level)
        step = s**level
        m = np.arange(blocks)[:, None]
        k = np.arange(1, s)[None, :]
        sites = (m * s + k) * step
        values = combine_log(values.reshape(blocks, s), log_w[sites - 1], params.b)
    return float(values[0])


def _wall_contacts(level: int, start: int, s: int, b: int) -> List[Tuple[int, ...]]:
    """Contact sets of every directed path across one block; branch 0 is the wall."""
    if level == 0:
        return [()]
    span = s ** (level - 1)
    junctions = tuple(start + k * span for k in range(1, s))

    on_wall = [
        _wall_contacts(level - 1, start + k * span, s, b) for k in range(s)
    ]
    paths: List[Tuple[int, ...]] = []
    for parts in itertools.product(*on_wall):
        paths.append(tuple(sorted(junctions + tuple(itertools.chain(*parts)))))

    off_wall_count = _path_count(level - 1, s, b) ** s
    paths.extend([()] * ((b - 1) * off_wall_count))
    return paths


def _path_count(level: int, s: int, b: int) -> int:
    return b ** ((s**level - 1) // (s - 1))


def enumerate_paths_partition(
    n: int,
    s: int,
    b: int,
    omega: np.ndarray,
    params: ModelParams,
    d: DisorderModel,
) -> float:
    """R_n as the average over all directed paths of exp(sum of contact weights)."""
    if float(b) != int(b) or b < 2:
        raise ArgumentError(f"path enumeration needs an integer b >= 2, got {b!r}")
    b = int(b)
    if n > settings.monte_carlo.ENUMERATION_MAX_LEVEL:
        raise SizeGuardError(
            "path enumeration limited to "
            f"n <= {settings.monte_carlo.ENUMERATION_MAX_LEVEL}, "
            f"got n={n} ({_path_count(n, s, b)} paths)"
        )
    omega = np.asarray(omega, dtype=float)
    _check_environment(s, n, omega)
    log_w = _site_log_weights(params, d, omega)

    paths = _wall_contacts(n, 0, s, b)
    assert len(paths) == _path_count(n, s, b)
    weights = [
        math.exp(math.fsum(log_w[t - 1] for t in contacts)) for contacts in paths
    ]
    return math.fsum(weights) / len(paths)
