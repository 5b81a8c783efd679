"""
Lattice / disorder parameter records shared by every computation.
"""

import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.app.config.settings import settings


class Regime(str, Enum):
    """Harris-criterion label of (b, s). Labels only, never used as branch logic."""

    RELEVANT = "relevant"
    MARGINAL = "marginal"
    IRRELEVANT = "irrelevant"
    ALPHA_ZERO = "alpha-zero"


class ModelParams(BaseModel):
    """Diamond lattice with branch length s, branching number b, disorder strength
    beta and pinning potential h."""

    model_config = ConfigDict(frozen=True)

    s: int = Field(ge=2)
    b: float = Field(gt=1.0)
    beta: float = Field(default=0.0, ge=0.0)
    h: float = 0.0

    def with_h(self, h: float) -> "ModelParams":
        return self.model_copy(update={"h": float(h)})

    def with_beta(self, beta: float) -> "ModelParams":
        return self.model_copy(update={"beta": float(beta)})

    @property
    def alpha(self) -> float:
        """Pure-system exponent (log s - log b)/log s."""
        return (math.log(self.s) - math.log(self.b)) / math.log(self.s)

    @property
    def is_marginal(self) -> bool:
        root = math.sqrt(self.s)
        return abs(self.b - root) <= settings.recursion.MARGINAL_TOLERANCE * root


def regime(b: float, s: int) -> Regime:
    """Classify (b, s) as relevant, marginal, irrelevant or alpha-zero."""
    root = math.sqrt(s)
    if abs(b - root) <= settings.recursion.MARGINAL_TOLERANCE * root:
        return Regime.MARGINAL
    if b < root:
        return Regime.RELEVANT
    if b < s:
        return Regime.IRRELEVANT
    return Regime.ALPHA_ZERO


def relevant_exponent(params: ModelParams) -> Optional[float]:
    """2 alpha / (2 alpha - 1), the h_c(beta) exponent when b < sqrt(s)."""
    if regime(params.b, params.s) is not Regime.RELEVANT:
        return None
    a = params.alpha
    return 2.0 * a / (2.0 * a - 1.0)


class DisorderKind(str, Enum):
    GAUSSIAN = "gaussian"
    BINARY_PM1 = "binary_pm1"
    TABLE_MGF = "table_mgf"


class DisorderModel(BaseModel):
    """Law of the site disorder omega, described by its log-MGF.

    Built-in kinds have exact closed forms. A table MGF is supplied as log M on a
    symmetric grid containing 0 and is interpolated linearly; it can be used by
    the certificates but not sampled.
    """

    model_config = ConfigDict(frozen=True)

    kind: DisorderKind = DisorderKind.GAUSSIAN
    table_t: Optional[List[float]] = None
    table_log_m: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_table(self) -> "DisorderModel":
        if self.kind is not DisorderKind.TABLE_MGF:
            return self
        if self.table_t is None or self.table_log_m is None:
            raise ValueError("table_mgf disorder requires table_t and table_log_m")
        t = np.asarray(self.table_t, dtype=float)
        lm = np.asarray(self.table_log_m, dtype=float)
        _validate_table(t, lm)
        return self

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind is DisorderKind.TABLE_MGF and self.table_t is not None:
            return (float(self.table_t[0]), float(self.table_t[-1]))
        return (-math.inf, math.inf)

    @property
    def can_sample(self) -> bool:
        return self.kind is not DisorderKind.TABLE_MGF


def _validate_table(t: np.ndarray, lm: np.ndarray) -> None:
    errors: List[str] = []
    if t.ndim != 1 or t.shape != lm.shape:
        raise ValueError("table_t and table_log_m must be 1-d and of equal length")
    if t.size < 3:
        raise ValueError("table needs at least 3 grid points")
    if np.any(np.diff(t) <= 0):
        errors.append("table_t must be strictly increasing")
    tol = settings.disorder.TABLE_SYMMETRY_TOL
    if np.max(np.abs(t + t[::-1])) > tol * max(1.0, float(np.max(np.abs(t)))):
        errors.append("table_t must be symmetric around 0")
    zero = np.flatnonzero(np.abs(t) <= tol)
    if zero.size != 1:
        errors.append("table_t must contain 0")
    if errors:
        raise ValueError("; ".join(errors))

    k = int(zero[0])
    if abs(lm[k]) > tol:
        errors.append(f"log M(0) must be 0, got {lm[k]!r}")

    slopes = np.diff(lm) / np.diff(t)
    if np.any(np.diff(slopes) < -settings.disorder.TABLE_CONVEXITY_TOL):
        errors.append("log M must be convex on the grid")

    step = t[k + 1]
    first = (lm[k + 1] - lm[k - 1]) / (2.0 * step)
    second = (lm[k + 1] - 2.0 * lm[k] + lm[k - 1]) / step**2
    norm_tol = settings.disorder.TABLE_NORMALIZATION_TOL
    if abs(first) > norm_tol:
        errors.append(f"omega must have mean 0 (finite-difference slope {first!r})")
    if abs(second - 1.0) > norm_tol:
        errors.append(
            f"omega must have unit variance (finite-difference curvature {second!r})"
        )
    if errors:
        raise ValueError("; ".join(errors))
