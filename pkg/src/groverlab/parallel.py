"""S identical oracles queried in synchronous rounds, and the split-the-space baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .analytic import success_after
from .bounds import BoundReport, crude_bound, improved_bound, success_ceiling
from .core import Step, apply_step, reflect_about_uniform

MAX_COMPOSITE_DIM = 2**20


def _check_cap(n: int, s: int):
    if n < 2 or s < 1:
        raise ValueError("need n >= 2 and s >= 1")
    if n**s > MAX_COMPOSITE_DIM:
        raise ValueError(f"composite dimension {n}^{s} exceeds cap {MAX_COMPOSITE_DIM}")


@dataclass(frozen=True)
class MultiQueryState:
    """Amplitudes over tuples (x_1, ..., x_s), flattened row-major (x_1 slowest)."""

    amplitudes: np.ndarray
    n: int
    s: int

    def __post_init__(self):
        _check_cap(self.n, self.s)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.n**self.s:
            raise ValueError(f"expected {self.n ** self.s} amplitudes, got {amps.size}")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-10:
            raise ValueError("multi-query state is not normalized")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @classmethod
    def uniform(cls, n: int, s: int) -> "MultiQueryState":
        _check_cap(n, s)
        dim = n**s
        return cls(np.full(dim, 1.0 / math.sqrt(dim), dtype=complex), n, s)

    @classmethod
    def basis(cls, n: int, s: int, registers: Sequence[int]) -> "MultiQueryState":
        amps = np.zeros(n**s, dtype=complex)
        amps[np.ravel_multi_index(tuple(registers), (n,) * s)] = 1.0
        return cls(amps, n, s)


@lru_cache(maxsize=64)
def register_hits(n: int, s: int, y: int) -> np.ndarray:
    """For each composite basis index, how many registers hold y (shape (n**s,))."""
    grid = np.indices((n,) * s).reshape(s, -1)
    counts = (grid == y).sum(axis=0)
    counts.setflags(write=False)
    return counts


def _flip(vec: np.ndarray, n: int, s: int, y: int) -> np.ndarray:
    return vec * np.where(register_hits(n, s, y) % 2, -1.0, 1.0)


def parallel_oracle(state: MultiQueryState, y: int) -> MultiQueryState:
    if not 0 <= y < state.n:
        raise ValueError(f"y={y} outside [0, {state.n})")
    return MultiQueryState(_flip(state.amplitudes, state.n, state.s, y), state.n, state.s)


def tensor_diffusion(n: int, s: int) -> Step:
    """Inversion about the mean on every register separately."""

    def step(vec: np.ndarray) -> np.ndarray:
        t = vec.reshape((n,) * s)
        for axis in range(s):
            t = 2.0 * t.mean(axis=axis, keepdims=True) - t
        return t.reshape(-1)

    return step


def run_parallel(
    n: int,
    s: int,
    y: Optional[int],
    t: int,
    steps: Sequence[Step] | Step,
) -> list[MultiQueryState]:
    """Synchronous rounds from the uniform composite state: all s oracles, then a step.

    ``steps`` is either one unitary reused every round or a length-t sequence;
    ``y=None`` replaces the oracles with the identity.
    """
    _check_cap(n, s)
    if t < 0:
        raise ValueError("t must be >= 0")
    if not isinstance(steps, (list, tuple)):
        steps = [steps] * t
    if len(steps) < t:
        raise ValueError(f"need {t} step unitaries, got {len(steps)}")
    state = MultiQueryState.uniform(n, s)
    trace = [state]
    vec = state.amplitudes
    for i in range(t):
        if y is not None:
            vec = _flip(vec, n, s, y)
        vec = apply_step(steps[i], vec)
        trace.append(MultiQueryState(vec, n, s))
    return trace


@dataclass(frozen=True)
class ProjectorCheck:
    lhs: float  # |P_y phi|^2, any register on y
    rhs: float  # sum_k |P_y^k phi|^2


def projector_decomposition_check(state: MultiQueryState, y: int) -> ProjectorCheck:
    w = np.abs(state.amplitudes) ** 2
    hits = register_hits(state.n, state.s, y)
    lhs = float(w[hits > 0].sum())
    rhs = float((w * hits).sum())
    assert lhs <= rhs + 1e-12
    return ProjectorCheck(lhs, rhs)


def register_query_total(trace: Sequence[MultiQueryState]) -> float:
    """sum_y sum_{i<T} sum_k |P_y^k phi_i|^2; equals s * T for any algorithm."""
    total = 0.0
    for state in trace[:-1]:
        w = np.abs(state.amplitudes) ** 2
        for y in range(state.n):
            total += float((w * register_hits(state.n, state.s, y)).sum())
    return total


def parallel_bound_report(n: int, s: int, t: int, steps: Sequence[Step] | Step) -> BoundReport:
    """Divergence over all n oracles versus n f(4 T^2 s / n) and 4 T^2 s."""
    empty = run_parallel(n, s, None, t, steps)[-1].amplitudes
    lhs = 0.0
    for y in range(n):
        diff = run_parallel(n, s, y, t, steps)[-1].amplitudes - empty
        lhs += float(np.vdot(diff, diff).real)
    return BoundReport(
        n, t, s,
        lhs_divergence=lhs,
        rhs_crude=crude_bound(t, s),
        rhs_improved=improved_bound(n, t, s),
        ceiling_p=success_ceiling(n, t, s),
    )


@dataclass(frozen=True)
class PartitionStats:
    n: int
    s: int
    per_engine_size: int
    t_per_engine: int
    success_prob: float
    total_queries: int


def partition_baseline(n: int, s: int, target_p: float) -> PartitionStats:
    """s independent Grover searches, each on its own n/s slice of the space.

    Runs the fewest rounds that lift the slice holding y to ``target_p``. With
    one element per slice no query is needed: the candidate is checked directly.
    """
    if s < 1 or n % s:
        raise ValueError(f"s={s} must divide n={n}")
    if not 0.0 < target_p <= 1.0:
        raise ValueError("target_p must lie in (0, 1]")
    size = n // s
    if size == 1:
        return PartitionStats(n, s, 1, 0, 1.0, 0)
    t = 0
    while True:
        p = success_after(size, t)
        if p >= target_p:
            break
        t += 1
        if t > 4 * math.isqrt(size) + 4:
            raise ValueError(f"target_p={target_p} unreachable on slices of size {size}")
    return PartitionStats(n, s, size, t, float(p), s * t)
