"""
Records produced by the recursions and by the Monte Carlo layer.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.app.models.params import DisorderModel, ModelParams


class TraceStatus(str, Enum):
    DIVERGING = "diverging"
    CONVERGED_BELOW_ONE = "converged_below_one"
    FLAT = "flat"
    UNDETERMINED = "undetermined"
    VARIANCE_BLOWN_UP = "variance_blown_up"


@dataclass(frozen=True)
class AnnealedTrace:
    """log r_n, p_n = r_n - 1 and relative variance v_n for n = 0..levels."""

    params: ModelParams
    log_r: np.ndarray
    p: np.ndarray
    v: Optional[np.ndarray]
    status: TraceStatus
    variance_blown_up: bool = False

    @property
    def levels(self) -> int:
        return int(self.log_r.size) - 1

    @property
    def final_log_r(self) -> float:
        return float(self.log_r[-1])

    @property
    def final_r(self) -> float:
        return float(np.exp(self.log_r[-1]))

    @property
    def variance_status(self) -> TraceStatus:
        """status, overridden by variance_blown_up once v_n saturated."""
        if self.variance_blown_up:
            return TraceStatus.VARIANCE_BLOWN_UP
        return self.status


class RngLineage(BaseModel):
    """Everything needed to re-derive the substreams of one pool replica.

    The substream of (level, chunk) is SeedSequence(seed, spawn_key=stream +
    (replica, level, chunk)); chunk k owns output samples
    [k * chunk_size, (k + 1) * chunk_size).
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0)
    stream: Tuple[int, ...] = ()
    replica: int = Field(default=0, ge=0)
    chunk_size: int = Field(default=16_384, ge=1)


@dataclass(frozen=True)
class Pool:
    """Population of log R_n samples at a fixed level."""

    level: int
    log_samples: np.ndarray
    params: ModelParams
    disorder: DisorderModel
    lineage: Optional[RngLineage] = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.log_samples.size)


class EstimateCI(BaseModel):
    """Replica mean and standard error of a per-pool statistic at a level.

    `bias_scale` is s^{-n}, the order of the systematic finite-level error of
    free-energy estimates (its constant is unknown).
    """

    mean: float
    stderr: float = Field(ge=0.0)
    n_samples: int = Field(ge=2)
    level: int
    bias_scale: float = 0.0
