"""Identifying one of N pure states: the distance-sum bound on average success.

For states psi_y and a reference psi, any von Neumann measurement with average
success p obeys

    2N - 2 sqrt(N p) - 2 sqrt(N (N-1) (1-p)) <= sum_y |psi_y - psi|^2

and Grover's final states meet it with equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._numerics import largest_feasible, random_unit_vector


def rephase(reference: np.ndarray, member: np.ndarray) -> np.ndarray:
    """Multiply ``member`` by a unit phase making <reference|member> real and >= 0."""
    ov = np.vdot(reference, member)
    if abs(ov) == 0.0:
        return member
    return member * (abs(ov) / ov)


@dataclass(frozen=True)
class StateFamily:
    members: np.ndarray  # shape (N, M), one row per psi_y
    reference: np.ndarray  # shape (M,)

    def __post_init__(self):
        members = np.atleast_2d(np.asarray(self.members, dtype=complex))
        ref = np.asarray(self.reference, dtype=complex)
        n, m = members.shape
        if ref.shape != (m,):
            raise ValueError(f"reference has shape {ref.shape}, members have dimension {m}")
        if m < n:
            raise ValueError(f"dimension M={m} smaller than family size N={n}")
        norms = np.linalg.norm(members, axis=1)
        if np.any(np.abs(norms - 1) > 1e-10) or abs(np.linalg.norm(ref) - 1) > 1e-10:
            raise ValueError("family members and reference must be unit vectors")
        members = np.array([rephase(ref, row) for row in members])
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "reference", ref)

    @property
    def n(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]


@dataclass(frozen=True)
class MeasurementScheme:
    """Answer sets M_y: measuring basis index m in ``assignment[y]`` answers y."""

    assignment: Sequence[Sequence[int]]
    dim: int
    owner: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        owner = np.full(self.dim, -1, dtype=int)
        for y, answer_set in enumerate(self.assignment):
            for m in answer_set:
                if not 0 <= m < self.dim:
                    raise ValueError(f"basis index {m} outside [0, {self.dim})")
                if owner[m] != -1:
                    raise ValueError(f"basis index {m} assigned to both {owner[m]} and {y}")
                owner[m] = y
        object.__setattr__(self, "owner", owner)

    @classmethod
    def computational(cls, n: int, dim: int | None = None) -> "MeasurementScheme":
        return cls([[y] for y in range(n)], n if dim is None else dim)

    @classmethod
    def random(cls, n: int, dim: int, rng: np.random.Generator) -> "MeasurementScheme":
        # each index goes to a random answer, or stays unassigned (-1)
        labels = rng.integers(-1, n, size=dim)
        return cls([np.flatnonzero(labels == y).tolist() for y in range(n)], dim)


@dataclass(frozen=True)
class MeasurementResult:
    p_avg: float
    p_y: np.ndarray
    a_y: np.ndarray


def grover_final_family(n: int, p: float) -> StateFamily:
    if n < 2:
        raise ValueError(f"invalid dimension {n}: need n >= 2")
    if p < 1.0 / n - 1e-15 or p > 1.0:
        raise ValueError(f"p={p} outside [1/n, 1]")
    p = min(max(p, 1.0 / n), 1.0)
    off = math.sqrt((1.0 - p) / (n - 1))
    members = np.full((n, n), off, dtype=complex)
    np.fill_diagonal(members, math.sqrt(p))
    return StateFamily(members, np.full(n, 1.0 / math.sqrt(n), dtype=complex))


def distance_sum(family: StateFamily) -> float:
    overlaps = family.members.conj() @ family.reference
    return float(np.sum(2.0 - 2.0 * overlaps.real))


def bound_value(n: int, p: float) -> float:
    """2n - 2 sqrt(n p) - 2 sqrt(n (n-1) (1-p)).

    Evaluated as n * (|sqrt p - sqrt(1/n)|^2 + |sqrt(1-p) - sqrt((n-1)/n)|^2),
    which is algebraically identical but free of cancellation near p = 1/n.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    d1 = math.sqrt(p) - math.sqrt(1.0 / n)
    d2 = math.sqrt(1.0 - p) - math.sqrt((n - 1) / n)
    return n * (d1 * d1 + d2 * d2)


def measurement_success(family: StateFamily, scheme: MeasurementScheme) -> MeasurementResult:
    if scheme.dim != family.dim:
        raise ValueError(f"scheme covers {scheme.dim} indices, family has dimension {family.dim}")
    n = family.n
    if len(scheme.assignment) > n:
        raise ValueError("scheme has more answer sets than the family has states")
    member_w = np.abs(family.members) ** 2
    ref_w = np.abs(family.reference) ** 2
    p_y = np.zeros(n)
    a_y = np.zeros(n)
    for y, answer_set in enumerate(scheme.assignment):
        idx = np.asarray(answer_set, dtype=int)
        p_y[y] = member_w[y, idx].sum()
        a_y[y] = ref_w[idx].sum()
    return MeasurementResult(float(p_y.mean()), p_y, a_y)


def per_y_minimum(p_y: float, a_y: float) -> float:
    """Smallest |psi_y - psi|^2 given p_y and a_y (both sign choices positive)."""
    return 2.0 - 2.0 * (math.sqrt(p_y * a_y) + math.sqrt((1.0 - p_y) * (1.0 - a_y)))


def max_p_given_distances(n: int, d: float) -> float:
    """Largest average success compatible with a distance sum ``d``."""
    if d < 0:
        raise ValueError("distance sum must be non-negative")
    return largest_feasible(lambda p: bound_value(n, p) <= d, 1.0 / n, 1.0)


def _sample_feasible(n: int, p: float, rng: np.random.Generator, concentration: float):
    a = rng.dirichlet(np.full(n, concentration))
    # mean-zero perturbation of p_y, scaled to stay inside [0, 1]
    delta = rng.standard_normal(n)
    delta -= delta.mean()
    limits = np.concatenate([(1.0 - p) / delta[delta > 0], p / -delta[delta < 0]])
    scale = rng.uniform() * limits.min() if limits.size else 0.0
    p_y = np.clip(p + scale * delta, 0.0, 1.0)
    return p_y, a


def _objective(p_y: np.ndarray, a_y: np.ndarray) -> float:
    return sum(per_y_minimum(pp, aa) for pp, aa in zip(p_y, a_y))


def _reduced_hessian(p_y: np.ndarray, a_y: np.ndarray, h: float = 1e-4) -> np.ndarray:
    # free coordinates p_1..p_{n-1}, a_1..a_{n-1}; p_0 and a_0 absorb the constraints
    n = p_y.size
    p_total, a_total = p_y.sum(), a_y.sum()

    def g(z):
        pf, af = z[: n - 1], z[n - 1 :]
        pv = np.concatenate([[p_total - pf.sum()], pf])
        av = np.concatenate([[a_total - af.sum()], af])
        return _objective(pv, av)

    z0 = np.concatenate([p_y[1:], a_y[1:]])
    k = z0.size
    hess = np.empty((k, k))
    eye = np.eye(k) * h
    for i in range(k):
        for j in range(i, k):
            val = (
                g(z0 + eye[i] + eye[j]) - g(z0 + eye[i] - eye[j]) - g(z0 - eye[i] + eye[j]) + g(z0 - eye[i] - eye[j])
            ) / (4 * h * h)
            hess[i, j] = hess[j, i] = val
    return hess


@dataclass(frozen=True)
class LagrangeCheck:
    worst_margin: float  # min over samples of objective - bound; negative = undercut
    undercuts: int
    stationary_value: float
    min_hessian_eig: float  # nan when p sits at an edge of [0, 1]


def lagrange_optimum_check(
    n: int,
    p: float,
    trials: int,
    rng: np.random.Generator,
    boundary_fraction: float = 0.2,
    hessian_points: int = 10,
    tol: float = 1e-9,
) -> LagrangeCheck:
    """Monte Carlo search for feasible (p_y, a_y) undercutting the closed-form minimum.

    A ``boundary_fraction`` of the samples draws a_y from a sparse Dirichlet, so
    some weights sit near 0. The reduced Hessian is probed at interior points,
    kept well clear of the box edges so the stencil stays feasible.
    """
    if not 1.0 / n <= p <= 1.0:
        raise ValueError(f"p={p} outside [1/n, 1]")
    bound = bound_value(n, p)
    stationary = _objective(np.full(n, p), np.full(n, 1.0 / n))
    worst = stationary - bound
    undercuts = 0
    n_boundary = int(trials * boundary_fraction)
    for k in range(trials):
        conc = 0.05 if k < n_boundary else 1.0
        p_y, a_y = _sample_feasible(n, p, rng, conc)
        margin = _objective(p_y, a_y) - bound
        worst = min(worst, margin)
        if margin < -tol:
            undercuts += 1

    # p at an edge pins every p_y there: no interior point to probe
    min_eig = math.inf if 1e-2 < p < 1 - 1e-2 else math.nan
    done = 0
    attempts = 0
    while done < hessian_points and not math.isnan(min_eig):
        attempts += 1
        if attempts > 1000 * hessian_points:
            raise RuntimeError("could not sample interior points for the Hessian check")
        p_y, a_y = _sample_feasible(n, p, rng, 10.0)
        if min(p_y.min(), a_y.min(), 1 - p_y.max(), 1 - a_y.max()) < 1e-3:
            continue
        eig = np.linalg.eigvalsh(_reduced_hessian(p_y, a_y))
        min_eig = min(min_eig, float(eig[0]))
        done += 1
    return LagrangeCheck(worst, undercuts, stationary, min_eig)


def random_family(n: int, dim: int, rng: np.random.Generator, spread: float = 1.0) -> StateFamily:
    """Members scattered around a random reference; small ``spread`` = hard to tell apart."""
    ref = random_unit_vector(dim, rng)
    members = []
    for _ in range(n):
        v = ref + spread * random_unit_vector(dim, rng)
        members.append(v / np.linalg.norm(v))
    return StateFamily(np.array(members), ref)


def greedy_scheme(family: StateFamily) -> MeasurementScheme:
    """Answer the member with the largest weight on each basis index."""
    owner = np.argmax(np.abs(family.members) ** 2, axis=0)
    return MeasurementScheme([np.flatnonzero(owner == y).tolist() for y in range(family.n)], family.dim)


@dataclass(frozen=True)
class SoundnessSummary:
    trials: int
    violations: int
    worst_slack: float  # min over trials of ceiling - p_avg


def soundness_trials(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-9) -> SoundnessSummary:
    """Random (family, measurement) pairs against the success ceiling.

    Dimensions are drawn from [n, 2n], member spreads log-uniformly over
    [1e-2, 3], and schemes alternate between random and greedy partitions.
    """
    violations = 0
    worst = math.inf
    for k in range(trials):
        dim = int(rng.integers(n, 2 * n + 1))
        family = random_family(n, dim, rng, spread=10 ** rng.uniform(-2, math.log10(3)))
        scheme = greedy_scheme(family) if k % 2 else MeasurementScheme.random(n, dim, rng)
        p_avg = measurement_success(family, scheme).p_avg
        slack = max_p_given_distances(n, distance_sum(family)) - p_avg
        worst = min(worst, slack)
        if slack < -tol:
            violations += 1
    return SoundnessSummary(trials, violations, worst)
