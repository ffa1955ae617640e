""" States: probability vectors, density matrices, convex combinations across summands, and the zero functional """
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same


@dataclass(frozen=True, eq=False)
class State:
    """payload: probability vector | density matrix | tuple of part States (with `weights`) | None (zero functional)"""
    signature: Tuple
    payload: Any
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        for x in (self.payload, self.weights):
            if isinstance(x, np.ndarray):
                x.setflags(write=False)

    @property
    def backend(self):
        return self.signature[0]

    @property
    def is_zero(self):
        return self.payload is None

    @property
    def parts(self):
        return self.payload

    def __repr__(self):
        if self.is_zero:
            return f"State[{self.backend}](0)"
        if isinstance(self.payload, tuple):
            return f"State[{self.backend}](weights={np.round(self.weights, 4)}, parts={self.payload})"
        return f"State[{self.backend}]({np.array2string(np.asarray(self.payload), precision=4)})"


def zero_state(E: Algebra) -> State:
    return State(E.signature, None)


def check_state(E: Algebra, state):
    if not isinstance(state, State) or state.signature != E.signature:
        got = state.signature if isinstance(state, State) else type(state).__name__
        raise errors.BackendMismatch(f"state of {got} used with algebra {E.signature}")


def pair(E: Algebra, state: State, a: Effect) -> float:
    """ω(a); the zero functional evaluates to 0 everywhere"""
    if state.is_zero:
        return 0.0
    return E.pair(state, a)


def ds_state(E: Algebra, weights, part_states) -> State:
    """Convex combination Σ λ_i ω_i over the summands of a direct sum"""
    if E.name != "direct_sum":
        raise errors.BackendMismatch(f"ds_state needs a direct sum, got {E.signature}")
    return E.state((weights, part_states))


def tomography(E: Algebra, functional) -> State:
    """Recover the State whose values on a panel of effects are given by `functional` (a callable on effects).

    Hilbertian: diagonal entries from P(e_j), real and imaginary off-diagonal parts from P((e_j + e_k)/√2) and
    P((e_j + i e_k)/√2). Classical: point indicators.
    """
    if E.name == "classical":
        p = np.array([functional(E.effect(np.eye(E.n)[j])) for j in range(E.n)])
        return E.state(p)
    if E.name == "hilbertian":
        d = E.d
        rho = np.zeros((d, d), dtype=complex)
        basis = np.eye(d, dtype=complex)
        readout = lambda v: functional(E.combine(v[:, None], [1.0]))
        for j in range(d):
            rho[j, j] = readout(basis[j])
        for j in range(d):
            for k in range(j + 1, d):
                mid = (rho[j, j].real + rho[k, k].real) / 2
                re = readout((basis[j] + basis[k]) / np.sqrt(2)) - mid
                im = mid - readout((basis[j] + 1j * basis[k]) / np.sqrt(2))
                rho[j, k] = re + 1j * im
                rho[k, j] = re - 1j * im
        return E.state(rho)
    raise errors.BackendMismatch(f"tomography is defined per summand, got {E.signature}")


def ds_state_decompose(E: Algebra, state: State):
    """Weights λ_i = ω(0, …, 1_i, …, 0) and renormalized part states read back from ω alone.

    A summand with zero weight gets the maximally mixed state of that part.
    """
    if E.name != "direct_sum":
        raise errors.BackendMismatch(f"ds_state_decompose needs a direct sum, got {E.signature}")
    check_state(E, state)
    if state.is_zero:
        raise errors.NotConvex("the zero functional is not a convex combination of states")

    def embedded(i, b):
        return E.effect(tuple(b if j == i else P.zero() for j, P in enumerate(E.parts)))

    weights = np.array([pair(E, state, embedded(i, P.unit())) for i, P in enumerate(E.parts)])
    weights = np.clip(weights, 0.0, 1.0)
    parts = []
    for i, P in enumerate(E.parts):
        if weights[i] <= E.tol.eq:
            parts.append(P.maximally_mixed())
        else:
            parts.append(tomography(P, lambda b, i=i, w=weights[i]: pair(E, state, embedded(i, b)) / w))
    return weights / weights.sum(), tuple(parts)


def state_distance(E: Algebra, s: State, t: State) -> float:
    """Distance between two extended states (the zero functional is at distance 1 from every state)"""
    check_state(E, s)
    check_state(E, t)
    if s.is_zero or t.is_zero:
        return 0.0 if s.is_zero and t.is_zero else 1.0
    return E.state_distance(s, t)
