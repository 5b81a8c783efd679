"""
Fractional-moment scalars: the map g_theta, its absorbing threshold x_theta,
a_theta = E[A^theta] and the deterministic u-recursion bound.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from src.app.config.settings import settings
from src.app.core.disorder import log_mgf
from src.app.models.params import DisorderModel
from src.app.utils.errors import ArgumentError

log = logging.getLogger(__name__)


def _check_theta(theta: float, allow_one: bool = True) -> None:
    upper_ok = theta <= 1.0 if allow_one else theta < 1.0
    if not (theta > 0.0 and upper_ok):
        bound = "]" if allow_one else ")"
        raise ArgumentError(f"theta must lie in (0, 1{bound}, got {theta!r}")


def g_theta(x: float, s: int, b: float, theta: float) -> float:
    """(x^s + (b-1)^theta) / b^theta."""
    return (x**s + (b - 1.0) ** theta) / b**theta


@lru_cache(maxsize=4096)
def x_theta(s: int, b: float, theta: float) -> Optional[float]:
    """Largest x in [0, 1] with g_theta(x) <= x, or None when there is none."""
    _check_theta(theta)
    if theta == 1.0:
        return 1.0

    def excess(x: float) -> float:
        return g_theta(x, s, b, theta) - x

    if excess(1.0) <= 0.0:
        return 1.0

    grid = np.linspace(0.0, 1.0, settings.fractional.X_THETA_GRID_SIZE + 1)
    values = (grid**s + (b - 1.0) ** theta) / b**theta - grid
    below = np.flatnonzero(values <= 0.0)
    if below.size:
        k = int(below[-1])
        left = float(grid[k])
    else:
        # The dip below the diagonal may be narrower than the grid spacing
        x_min = (b**theta / s) ** (1.0 / (s - 1))
        if not (0.0 < x_min < 1.0) or excess(x_min) > 0.0:
            return None
        left = x_min
        k = int(np.searchsorted(grid, x_min, side="right")) - 1

    right = float(grid[k + 1])
    if excess(left) == 0.0:
        return left
    root = bisect(excess, left, right, xtol=settings.fractional.X_THETA_TOLERANCE)
    return float(root)


def log_a_theta(d: DisorderModel, beta: float, h: float, theta: float) -> float:
    """log E[A^theta] = theta (h - log M(beta)) + log M(theta beta)."""
    return theta * (h - log_mgf(d, beta)) + log_mgf(d, theta * beta)


def a_theta(d: DisorderModel, beta: float, h: float, theta: float) -> float:
    return math.exp(log_a_theta(d, beta, h, theta))


def fractional_step(u: float, a: float, s: int, b: float, theta: float) -> float:
    """u_{i+1} bound: (u_i^s a^{s-1} + (b-1)^theta) / b^theta."""
    return (u**s * a ** (s - 1) + (b - 1.0) ** theta) / b**theta


def fractional_trace(
    s: int, b: float, theta: float, a: float, n_max: int
) -> np.ndarray:
    """u_0 = 1, u_1, ..., u_{n_max} of the bound recursion (inf once it overflows)."""
    _check_theta(theta)
    if n_max < 0:
        raise ArgumentError(f"n_max must be >= 0, got {n_max}")
    us = np.empty(n_max + 1)
    us[0] = 1.0
    for i in range(n_max):
        try:
            us[i + 1] = fractional_step(float(us[i]), a, s, b, theta)
        except OverflowError:
            us[i + 1:] = math.inf
            break
    return us
