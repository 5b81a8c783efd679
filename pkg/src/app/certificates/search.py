"""
Bisection on a monotone yes/no predicate over log h.
"""

import math
from typing import Callable, NamedTuple


class BisectionResult(NamedTuple):
    good: float
    bad: float
    steps: int
    converged: bool


def bisect_predicate(
    is_good: Callable[[float], bool],
    good: float,
    bad: float,
    rel_tol: float,
    max_steps: int,
) -> BisectionResult:
    """Shrink [good, bad] (either order) keeping is_good(good) and not is_good(bad).

    Endpoints are log h values; convergence means h_bad / h_good is within
    1 + rel_tol.
    """
    tol = math.log1p(rel_tol)
    steps = 0
    while abs(bad - good) > tol and steps < max_steps:
        mid = 0.5 * (good + bad)
        if is_good(mid):
            good = mid
        else:
            bad = mid
        steps += 1
    return BisectionResult(good, bad, steps, abs(bad - good) <= tol)
