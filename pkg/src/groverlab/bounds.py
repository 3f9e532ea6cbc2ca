"""The query lower-bound chain, evaluated numerically on concrete algorithms.

An algorithm is a list of step unitaries; step i is applied right after the
i-th oracle call. Comparing the run against every single-marked oracle with the
run against the empty oracle gives the divergence sum, which is bounded by

    divergence <= n f(4 T^2 s / n) <= 4 T^2 s

where f is the arc-geometry improvement function below. Inverting the
discrimination bound turns the right-hand side into a success ceiling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import QState, Step, apply_step, diffusion_step, init_uniform, run_algorithm
from .discrimination import max_p_given_distances, rephase

CHAIN_TOL = 1e-9


class DomainError(ValueError):
    """Argument outside the range where the improvement function is defined."""


@dataclass(frozen=True)
class BoundReport:
    n: int
    t: int
    s: int
    lhs_divergence: float
    rhs_crude: float
    rhs_improved: Optional[float]  # None where 4T^2 s / n leaves the domain of f
    ceiling_p: float

    @property
    def rhs(self) -> float:
        """Tightest bound available at this (n, t, s)."""
        if self.rhs_improved is None:
            return self.rhs_crude
        return min(self.rhs_improved, self.rhs_crude)

    @property
    def saturation_gap(self) -> float:
        return self.rhs - self.lhs_divergence

    @property
    def holds(self) -> bool:
        return self.lhs_divergence <= self.rhs + CHAIN_TOL


def divergence_sum(empty_trace: Sequence[QState], marked_runs: Sequence[Sequence[QState]]) -> float:
    """sum_y |phi_T^y - phi_T|^2, raw vectors, summed in ascending y."""
    final = empty_trace[-1].amplitudes
    total = 0.0
    for run in marked_runs:
        if len(run) != len(empty_trace):
            raise ValueError(f"trace length {len(run)} differs from empty-oracle trace length {len(empty_trace)}")
        if run[-1].dimension != final.size:
            raise ValueError("trace dimension mismatch")
        diff = run[-1].amplitudes - final
        total += float(np.vdot(diff, diff).real)
    return total


def query_mass(trace: Sequence[QState], y: int) -> float:
    """sum_{i<T} |P_y phi_i|^2 over the states fed to the oracle."""
    return float(sum(abs(state.amplitudes[y]) ** 2 for state in trace[:-1]))


def crude_bound(t: int, s: int = 1) -> float:
    if t < 0 or s < 0:
        raise ValueError("t and s must be non-negative")
    return 4.0 * t * t * s


def f_domain_max(t: int) -> float:
    """Largest x accepted by :func:`improvement_f`; there the arc angle reaches pi."""
    if t == 0:
        return 0.0
    if t == 1:
        return 4.0
    return 4.0 * t * t * math.sin(math.pi / (2 * t)) ** 2


def improvement_f(x: float, t: int) -> float:
    """f(4 t^2 sin^2(a / 2t)) = 4 sin^2(a / 2) for arc angle a in [0, pi].

    The input is the bound on t * sum of squared step lengths; the output is
    the largest squared chord a t-segment path with that budget can span.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    x_max = f_domain_max(t)
    if x < 0 or x > x_max * (1 + 1e-15):
        raise DomainError(f"x={x!r} outside [0, {x_max!r}] for t={t}")
    if t == 0:
        return 0.0
    alpha = 2.0 * t * math.asin(min(1.0, math.sqrt(x) / (2.0 * t)))
    return 4.0 * math.sin(min(alpha, math.pi) / 2.0) ** 2


def jensen_rhs(n: int, t: int, s: int = 1) -> float:
    """n f(4 t^2 s / n); raises DomainError when the mean leaves the domain."""
    return n * improvement_f(4.0 * t * t * s / n, t)


def improved_bound(n: int, t: int, s: int = 1) -> Optional[float]:
    try:
        return jensen_rhs(n, t, s)
    except DomainError:
        return None


def success_ceiling(n: int, t: int, s: int = 1, improved: bool = True) -> float:
    """Largest average success probability any t-round, s-oracle algorithm can reach."""
    if t < 0 or s < 1:
        raise ValueError("need t >= 0 and s >= 1")
    rhs = crude_bound(t, s)
    if improved:
        better = improved_bound(n, t, s)
        if better is not None:
            rhs = min(rhs, better)
    return max_p_given_distances(n, rhs)


def grover_steps(t: int) -> list[Step]:
    return [diffusion_step] * t


def algorithm_report(n: int, t: int, steps: Sequence[Step], s: int = 1) -> BoundReport:
    """Divergence sum of a single-register algorithm against the bound chain."""
    if len(steps) != t:
        raise ValueError(f"expected {t} step unitaries, got {len(steps)}")
    empty = run_algorithm(n, None, steps)
    runs = [run_algorithm(n, y, steps) for y in range(n)]
    return BoundReport(
        n, t, s,
        lhs_divergence=divergence_sum(empty, runs),
        rhs_crude=crude_bound(t, s),
        rhs_improved=improved_bound(n, t, s),
        ceiling_p=success_ceiling(n, t, s),
    )


def grover_report(n: int, t: int) -> BoundReport:
    return algorithm_report(n, t, grover_steps(t))


def _evolve(steps: Sequence[Step], vec: np.ndarray, marked: Optional[int], start: int, stop: int) -> np.ndarray:
    # apply (oracle, step) pairs start..stop-1; marked=None means empty oracle
    for i in range(start, stop):
        vec = vec.copy()
        if marked is not None:
            vec[marked] = -vec[marked]
        vec = apply_step(steps[i], vec)
    return vec


def telescoping_check(n: int, y: int, t: int, steps: Sequence[Step]) -> float:
    """Max residual of phi_T - phi_T^y = sum_i (U_y)^{T-1-i} dU phi_i over prefixes T <= t.

    With step-dependent unitaries, (U_y)^{T-1-i} becomes the marked-oracle
    evolution through steps i+1 .. T-1.
    """
    if n > 64 or t > 16:
        raise ValueError("telescoping check is limited to n <= 64, t <= 16")
    empty = run_algorithm(n, None, steps[:t])
    marked = run_algorithm(n, y, steps[:t])
    worst = 0.0
    for big_t in range(1, t + 1):
        acc = np.zeros(n, dtype=complex)
        for i in range(big_t):
            phi_i = empty[i].amplitudes
            flipped = phi_i.copy()
            flipped[y] = -flipped[y]
            delta = apply_step(steps[i], phi_i) - apply_step(steps[i], flipped)
            acc += _evolve(steps, delta, y, i + 1, big_t)
        lhs = empty[big_t].amplitudes - marked[big_t].amplitudes
        worst = max(worst, float(np.linalg.norm(lhs - acc)))
    return worst


@dataclass(frozen=True)
class ChainTerms:
    """Both sides of each numbered step of the per-y chain at one (y, T)."""

    distance: float  # |phi_T^y - phi_T|
    sum_of_norms: float  # sum_i |(U_y)^{T-1-i} dU phi_i|  (rhs of triangle inequality)
    sum_of_projections: float  # 2 sum_i |P_y phi_i|
    step_norms: np.ndarray  # |dU phi_i|
    proj_norms: np.ndarray  # |P_y phi_i|
    before_sum: float  # 4 T sum_i |P_y phi_i|^2


def chain_terms(n: int, y: int, t: int, steps: Sequence[Step]) -> ChainTerms:
    empty = run_algorithm(n, None, steps[:t])
    marked = run_algorithm(n, y, steps[:t])
    step_norms = np.empty(t)
    proj_norms = np.empty(t)
    for i in range(t):
        phi_i = empty[i].amplitudes
        flipped = phi_i.copy()
        flipped[y] = -flipped[y]
        delta = apply_step(steps[i], phi_i) - apply_step(steps[i], flipped)
        # (U_y)^k is unitary, so |(U_y)^k dU phi_i| = |dU phi_i|
        step_norms[i] = np.linalg.norm(delta)
        proj_norms[i] = abs(phi_i[y])
    distance = float(np.linalg.norm(empty[t].amplitudes - marked[t].amplitudes))
    return ChainTerms(
        distance=distance,
        sum_of_norms=float(step_norms.sum()),
        sum_of_projections=float(2 * proj_norms.sum()),
        step_norms=step_norms,
        proj_norms=proj_norms,
        before_sum=float(4 * t * np.sum(proj_norms**2)),
    )


def sum_of_squares_identity(a: np.ndarray) -> tuple[float, float, float]:
    """((sum a)^2, T sum a^2, (sum a)^2 + 1/2 sum_ij (a_i - a_j)^2)."""
    a = np.asarray(a, dtype=float)
    s = a.sum() ** 2
    pair = 0.5 * np.sum((a[:, None] - a[None, :]) ** 2)
    return float(s), float(a.size * np.sum(a**2)), float(s + pair)


def minimal_path_length(alpha: float, t: int) -> float:
    """Smallest sum |psi_i - psi_{i+1}|^2 over t unit-vector steps spanning angle alpha."""
    if not 0.0 <= alpha <= math.pi:
        raise ValueError(f"alpha={alpha} outside [0, pi]")
    if t < 1:
        raise ValueError("t must be >= 1")
    return t * (2.0 * math.sin(alpha / (2 * t))) ** 2


@dataclass(frozen=True)
class ArcPath:
    psi_0: QState
    psi_t: QState  # rephased so <psi_0|psi_t> is real and >= 0
    alpha: float
    segment_count: int

    @classmethod
    def between(cls, psi_0: QState, psi_t: QState, t: int) -> "ArcPath":
        if t < 1:
            raise ValueError("an arc needs at least one segment")
        end = QState(rephase(psi_0.amplitudes, psi_t.amplitudes))
        cos_a = min(1.0, max(-1.0, psi_0.overlap(end).real))
        return cls(psi_0, end, math.acos(cos_a), t)

    def interpolants(self) -> list[np.ndarray]:
        """Equally spaced unit vectors psi_0 .. psi_T along the great circle."""
        a = self.psi_0.amplitudes
        b = self.psi_t.amplitudes
        if self.alpha < 1e-15:
            return [a.copy() for _ in range(self.segment_count + 1)]
        perp = b - math.cos(self.alpha) * a
        perp = perp / np.linalg.norm(perp)
        return [
            math.cos(k * self.alpha / self.segment_count) * a + math.sin(k * self.alpha / self.segment_count) * perp
            for k in range(self.segment_count + 1)
        ]

    def chord_sq(self) -> float:
        d = self.psi_0.amplitudes - self.psi_t.amplitudes
        return float(np.vdot(d, d).real)


def path_length(points: Sequence[np.ndarray]) -> float:
    return float(sum(np.vdot(q - p, q - p).real for p, q in zip(points[:-1], points[1:])))


def _descent_minimum(path: ArcPath, rng: np.random.Generator) -> float:
    # free interior points as real vectors, projected onto the unit sphere
    a, b = path.psi_0.amplitudes, path.psi_t.amplitudes
    m = a.size
    k = path.segment_count - 1

    def unpack(z):
        v = z[: k * m] + 1j * z[k * m :]
        v = v.reshape(k, m)
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def objective(z):
        pts = [a, *unpack(z), b]
        return path_length(pts)

    z0 = rng.standard_normal(2 * k * m)
    res = minimize(objective, z0, method="BFGS", options={"gtol": 1e-12, "maxiter": 20000})
    # polish from the best point found
    res = minimize(objective, res.x, method="BFGS", options={"gtol": 1e-13, "maxiter": 20000})
    return float(res.fun)


@dataclass(frozen=True)
class ArcCheck:
    stationarity: float  # max |psi_i - normalize(psi_{i-1} + psi_{i+1})|
    formula: float  # minimal_path_length(alpha, t)
    descent_best: float  # smallest path length found numerically
    undercut: float  # formula - descent_best (must not exceed 1e-8)


def arc_minimizer_check(psi_0: QState, psi_t: QState, t: int, rng: np.random.Generator, starts: int = 3) -> ArcCheck:
    path = ArcPath.between(psi_0, psi_t, t)
    formula = minimal_path_length(path.alpha, t)
    if t == 1:
        return ArcCheck(0.0, formula, path.chord_sq(), 0.0)
    pts = path.interpolants()
    stationarity = 0.0
    for i in range(1, t):
        mid = pts[i - 1] + pts[i + 1]
        stationarity = max(stationarity, float(np.linalg.norm(pts[i] - mid / np.linalg.norm(mid))))
    best = min(_descent_minimum(path, rng) for _ in range(starts))
    return ArcCheck(stationarity, formula, best, formula - best)


def successive_angles(trace: Sequence[QState]) -> np.ndarray:
    """Angles arccos Re<psi_i|psi_{i+1}> along a trace."""
    out = []
    for p, q in zip(trace[:-1], trace[1:]):
        out.append(math.acos(min(1.0, max(-1.0, p.overlap(q).real))))
    return np.array(out)


def uniform_trace(n: int, t: int) -> list[QState]:
    return [init_uniform(n)] * (t + 1)
