from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.stats import unitary_group

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 60


def largest_feasible(
    feasible: Callable[[float], bool],
    lo: float,
    hi: float,
    tol: float = BISECT_TOL,
    max_iter: int = BISECT_MAX_ITER,
) -> float:
    """Right end of a feasible prefix [lo, x*] of a monotone predicate.

    ``feasible(lo)`` is assumed true. The result is the infeasible side of the
    final bracket padded by ``tol`` (capped at ``hi``), so floating-point noise
    in the predicate cannot pull it below x*.
    """
    top = hi
    if feasible(hi):
        return hi
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return min(hi + tol, top)


def smallest_int_feasible(feasible: Callable[[int], bool], lo: int, hi: int) -> int:
    """Smallest integer k in [lo, hi] with feasible(k); feasible must be monotone."""
    if feasible(lo):
        return lo
    if not feasible(hi):
        raise ValueError(f"no feasible integer in [{lo}, {hi}]")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)
