"""Closed-form Grover predictions: rotation angle, success curve, stopping rules."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from . import bounds
from ._numerics import BISECT_TOL, smallest_int_feasible


@dataclass(frozen=True)
class AngleModel:
    n: int
    phi: float


@dataclass(frozen=True)
class IterationOptimum:
    t_star_fractional: float
    t_best: int
    p_best: float


@dataclass(frozen=True)
class RestartPlan:
    stop_at: int
    success_prob: float
    expected_queries: float
    savings_vs_full: float


def rotation_angle(n: int) -> AngleModel:
    if n < 2:
        raise ValueError(f"invalid dimension {n}: need n >= 2")
    cos_phi = 1.0 - 2.0 / n
    sin_phi = 2.0 * math.sqrt(n - 1) / n
    phi = math.atan2(sin_phi, cos_phi)
    assert abs(math.cos(phi) - cos_phi) < 1e-12 and abs(math.sin(phi) - sin_phi) < 1e-12
    return AngleModel(n, phi)


def success_after(n: int, t):
    """sin^2((2t + 1) phi / 2); ``t`` may be an int or an array of ints."""
    phi = rotation_angle(n).phi
    t_arr = np.asarray(t)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    p = np.sin((2 * t_arr + 1) * phi / 2) ** 2
    return float(p) if p.ndim == 0 else p


def optimal_iterations(n: int) -> IterationOptimum:
    phi = rotation_angle(n).phi
    t_star = (math.pi / phi - 1.0) / 2.0
    lo = max(0, math.floor(t_star))
    candidates = [lo, lo + 1]
    probs = [success_after(n, t) for t in candidates]
    # ties (up to rounding) go to the cheaper run
    best = 0 if probs[0] >= probs[1] - 1e-12 else 1
    return IterationOptimum(t_star, candidates[best], probs[best])


def restart_optimum(n: int) -> RestartPlan:
    """Stop early and restart on failure; exhaustive scan over the stopping time."""
    if n < 4:
        raise ValueError(f"restart analysis needs n >= 4, got {n}")
    full = optimal_iterations(n)
    ts = np.arange(1, full.t_best + 1)
    ps = success_after(n, ts)
    cost = ts / ps
    i = int(np.argmin(cost))
    expected = float(cost[i])
    return RestartPlan(int(ts[i]), float(ps[i]), expected, 1.0 - expected / full.t_best)


def restart_continuum() -> tuple[float, float]:
    """Large-N limit: minimize t / sin^2(t), i.e. solve tan t = 2t.

    Returns the optimal rotation ``t*`` and the fractional saving relative to
    running the full pi/2 rotation.
    """
    t_star = bisect(lambda t: math.tan(t) - 2.0 * t, 1.0, 1.5, xtol=BISECT_TOL)
    # cost ~ (sqrt(N)/2) t*/sin^2 t* against the full run (sqrt(N)/2)(pi/2)
    savings = 1.0 - 2.0 * t_star / (math.pi * math.sin(t_star) ** 2)
    return t_star, savings


def lower_bound_T(n: int, p: float, s: int = 1, improved: bool = True) -> int:
    """Fewest synchronous query rounds any algorithm needs to reach success ``p``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if p < 1.0 / n - 1e-12 or p > 1.0:
        raise ValueError(f"target p={p} outside [1/n, 1]; T=0 already achieves 1/n")
    if p <= 1.0 / n + 1e-12:
        return 0
    # crude: 4 T^2 s >= 2n covers every distance sum; improved: arc angle >= pi/2
    t_hi = math.ceil(math.sqrt(n / (2.0 * s))) + 1
    if improved:
        t_hi = max(t_hi, math.ceil(math.pi / (4.0 * math.asin(min(1.0, math.sqrt(s / n))))) + 1)
    return smallest_int_feasible(
        lambda t: bounds.success_ceiling(n, t, s, improved=improved) >= p, 0, t_hi
    )
