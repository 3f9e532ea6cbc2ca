"""Exact state-vector simulation of Grover search with a single marked element.

Two equivalent pictures are provided: the full N-dimensional amplitude vector
and the reduced (A, B) pair living on the 2D invariant subspace spanned by the
marked basis state and the uniform superposition over unmarked states.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

NORM_TOL = 1e-10

Step = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class QState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError(f"state needs a 1-D amplitude vector of length >= 2, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: "QState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @classmethod
    def basis(cls, n: int, index: int) -> "QState":
        amps = np.zeros(n, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class ReducedState:
    a_unmarked: float
    b_marked: float

    def __post_init__(self):
        r = self.a_unmarked**2 + self.b_marked**2
        if abs(r - 1.0) > NORM_TOL:
            raise ValueError(f"reduced state off the unit circle (A^2 + B^2 = {r!r})")


@dataclass(frozen=True)
class OracleSpec:
    n: int
    marked: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"search space needs n >= 2, got {self.n}")
        if not 0 <= self.marked < self.n:
            raise ValueError(f"marked element {self.marked} outside [0, {self.n})")


def _check_dim(state: QState, oracle: OracleSpec):
    if state.dimension != oracle.n:
        raise ValueError(f"state dimension {state.dimension} does not match oracle size {oracle.n}")


def init_uniform(n: int) -> QState:
    if n < 2:
        raise ValueError(f"invalid dimension {n}: need n >= 2")
    return QState(np.full(n, 1.0 / np.sqrt(n), dtype=complex))


def apply_oracle(state: QState, oracle: OracleSpec) -> QState:
    _check_dim(state, oracle)
    amps = state.amplitudes.copy()
    amps[oracle.marked] = -amps[oracle.marked]
    return QState(amps)


def reflect_about_uniform(vec: np.ndarray) -> np.ndarray:
    """(2|u><u| - I) applied to a raw vector, any length."""
    return 2.0 * vec.mean() - vec


def walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    """H on every qubit of a length-2**l vector (butterfly, O(N log N))."""
    n = vec.size
    if n < 2 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of 2")
    out = np.array(vec, dtype=complex)
    h = 1
    while h < n:
        blocks = out.reshape(-1, 2, h)
        top = blocks[:, 0, :].copy()
        bottom = blocks[:, 1, :]
        blocks[:, 0, :] = top + bottom
        blocks[:, 1, :] = top - bottom
        h *= 2
    return out / np.sqrt(n)


def _diffusion_hadamard(vec: np.ndarray) -> np.ndarray:
    # H^l, sign flip on every x != 0, H^l
    w = walsh_hadamard(vec)
    w[1:] = -w[1:]
    return walsh_hadamard(w)


def apply_diffusion(state: QState, method: str = "reflection") -> QState:
    """Inversion about the mean.

    ``method="hadamard"`` uses the qubit-level circuit and needs a power-of-two
    dimension; ``"reflection"`` works for any N.
    """
    if method == "reflection":
        return QState(reflect_about_uniform(state.amplitudes))
    if method == "hadamard":
        return QState(_diffusion_hadamard(state.amplitudes))
    raise ValueError(f"unknown diffusion method {method!r}")


def grover_step(state: QState, oracle: OracleSpec) -> QState:
    return apply_diffusion(apply_oracle(state, oracle))


def grover_iterate(state: QState, oracle: OracleSpec, steps: int) -> list[QState]:
    """Trace [phi_0, ..., phi_steps], one oracle call plus diffusion per step."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    trace = [state]
    for _ in range(steps):
        trace.append(grover_step(trace[-1], oracle))
    return trace


def grover_final(state: QState, oracle: OracleSpec, steps: int) -> QState:
    """Streaming variant of :func:`grover_iterate`; keeps no trace."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    for _ in range(steps):
        state = grover_step(state, oracle)
    return state


def empty_oracle_run(n: int, steps: int) -> list[QState]:
    """Grover's circuit with the oracle replaced by the identity."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    trace = [init_uniform(n)]
    for _ in range(steps):
        trace.append(apply_diffusion(trace[-1]))
    return trace


def success_probability(state: QState, oracle: OracleSpec) -> float:
    _check_dim(state, oracle)
    return float(abs(state.amplitudes[oracle.marked]) ** 2)


def reduced_initial(n: int) -> ReducedState:
    # half-angle start: cos(phi/2) = sqrt((n-1)/n), sin(phi/2) = 1/sqrt(n)
    if n < 2:
        raise ValueError(f"invalid dimension {n}: need n >= 2")
    return ReducedState(np.sqrt((n - 1) / n), 1.0 / np.sqrt(n))


def reduced_step(state: ReducedState, n: int) -> ReducedState:
    if n < 2:
        raise ValueError(f"invalid dimension {n}: need n >= 2")
    c = 1.0 - 2.0 / n
    s = 2.0 * np.sqrt(n - 1) / n
    a, b = state.a_unmarked, state.b_marked
    return ReducedState(c * a - s * b, s * a + c * b)


def reduced_trace(n: int, steps: int) -> list[ReducedState]:
    trace = [reduced_initial(n)]
    for _ in range(steps):
        trace.append(reduced_step(trace[-1], n))
    return trace


def unmarked_uniform(n: int, marked: int) -> np.ndarray:
    v = np.full(n, 1.0 / np.sqrt(n - 1), dtype=complex)
    v[marked] = 0.0
    return v


def to_reduced(state: QState, oracle: OracleSpec) -> tuple[ReducedState, float]:
    """Project onto span{unmarked-uniform, |y>}; also return the residual norm."""
    _check_dim(state, oracle)
    amps = state.amplitudes
    rest = unmarked_uniform(oracle.n, oracle.marked)
    a = np.vdot(rest, amps)
    b = amps[oracle.marked]
    residual = amps - a * rest
    residual[oracle.marked] -= b
    return ReducedState(float(a.real), float(b.real)), float(np.linalg.norm(residual))


def apply_step(step: Step, vec: np.ndarray) -> np.ndarray:
    if callable(step):
        return step(vec)
    return np.asarray(step) @ vec


def run_algorithm(
    n: int,
    marked: int | None,
    steps: Sequence[Step],
    initial: QState | None = None,
) -> list[QState]:
    """Generic query algorithm: oracle call then ``steps[i]``, for each i.

    ``marked=None`` runs the empty oracle (no sign flip at all). Returns the
    trace of states seen just before each oracle call plus the final state.
    """
    state = init_uniform(n) if initial is None else initial
    if state.dimension != n:
        raise ValueError(f"initial state dimension {state.dimension} != {n}")
    trace = [state]
    vec = state.amplitudes
    for step in steps:
        vec = vec.copy()
        if marked is not None:
            vec[marked] = -vec[marked]
        vec = apply_step(step, vec)
        trace.append(QState(vec))
    return trace


def diffusion_step(vec: np.ndarray) -> np.ndarray:
    return reflect_about_uniform(vec)
