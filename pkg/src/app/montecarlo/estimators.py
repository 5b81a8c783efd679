"""
Replica-based estimators.

Samples inside one pool are correlated through resampling, so confidence
intervals are built from one statistic per independent replica.
"""

import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from src.app.models.traces import EstimateCI, Pool
from src.app.utils.errors import ArgumentError


def _check_ensemble(pools: Sequence[Pool]) -> int:
    if len(pools) < 2:
        raise ArgumentError(
            f"need at least 2 independent replicas, got {len(pools)}"
        )
    levels = {p.level for p in pools}
    if len(levels) != 1:
        raise ArgumentError(f"replicas are at different levels: {sorted(levels)}")
    return pools[0].level


def _replica_ci(values: np.ndarray, level: int, bias_scale: float) -> EstimateCI:
    count = int(values.size)
    mean = float(np.mean(values))
    if np.all(values == values[0]):
        stderr = 0.0
    else:
        stderr = float(np.std(values, ddof=1) / math.sqrt(count))
    return EstimateCI(
        mean=mean, stderr=stderr, n_samples=count, level=level, bias_scale=bias_scale
    )


def estimate_log_mean(pools: Sequence[Pool]) -> EstimateCI:
    """E log R_n from the replica pool means."""
    level = _check_ensemble(pools)
    values = np.array([np.mean(p.log_samples) for p in pools])
    return _replica_ci(values, level, 0.0)


def estimate_free_energy(pools: Sequence[Pool]) -> EstimateCI:
    """s^{-n} E log R_n; systematic error O(s^{-n}) reported via bias_scale."""
    level = _check_ensemble(pools)
    scale = float(pools[0].params.s) ** (-level)
    values = np.array([scale * np.mean(p.log_samples) for p in pools])
    return _replica_ci(values, level, scale)


def estimate_fractional_moment(pools: Sequence[Pool], theta: float) -> EstimateCI:
    """E[R_n^theta] from per-replica means of exp(theta log R_n)."""
    if not 0.0 < theta <= 1.0:
        raise ArgumentError(f"theta must lie in (0, 1], got {theta!r}")
    level = _check_ensemble(pools)
    values = np.array(
        [
            math.exp(logsumexp(theta * p.log_samples) - math.log(p.size))
            for p in pools
        ]
    )
    return _replica_ci(values, level, 0.0)
