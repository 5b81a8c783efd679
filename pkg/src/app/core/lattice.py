"""
Geometry of the diamond lattice D_n: Green function, expected contacts and the
level sets V_i of the wall sites 1..s^n - 1.
"""

from typing import List

import numpy as np

from src.app.models.params import ModelParams
from src.app.utils.errors import ArgumentError, SizeGuardError


def green_site(i: int, b: float) -> float:
    """Probability that the uniform path visits a given level-i site."""
    if i < 0:
        raise ArgumentError(f"level index must be >= 0, got {i}")
    return float(b ** (-i))


def contact_terms(n: int, params: ModelParams) -> List[float]:
    """b^{-i} (s-1) s^{i-1} for i = 1..n."""
    s, b = params.s, params.b
    return [green_site(i, b) * (s - 1) * s ** (i - 1) for i in range(1, n + 1)]


def expected_contacts(n: int, params: ModelParams) -> float:
    """Exact expected number of wall contacts, (s-1)((s/b)^n - 1)/(s-b)."""
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    s, b = params.s, params.b
    if b == s:
        return n * (s - 1) / s
    return (s - 1) * ((s / b) ** n - 1.0) / (s - b)


def expected_contacts_asymptotic(n: int, params: ModelParams) -> float:
    """Large-n equivalent (s-1)(s/b)^n/(s-b) of the contact count (b < s)."""
    s, b = params.s, params.b
    if b >= s:
        raise ArgumentError("the geometric equivalent needs b < s")
    return (s - 1) * (s / b) ** n / (s - b)


def vi_size(i: int, n: int, s: int) -> int:
    """|V_i| = (s-1) s^{n-1-i}."""
    if not 0 <= i < n:
        raise SizeGuardError(f"level index i={i} outside [0, {n})")
    return (s - 1) * s ** (n - 1 - i)


def vi_members(i: int, n: int, s: int) -> np.ndarray:
    """Sites j in 1..s^n - 1 divisible by s^i but not by s^{i+1}."""
    size = vi_size(i, n, s)
    step = s**i
    js = np.arange(1, s ** (n - i), dtype=np.int64) * step
    members = js[js % (step * s) != 0]
    assert members.size == size
    return members
