""" Direct sums E₁ ⊕ ⋯ ⊕ E_k with componentwise operations; nested sums are flattened """
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.linalg

from src.effects import errors
from src.effects.core import Algebra, Effect, ToleranceConfig
from src.backends import linalg
from src.backends.states import State, pair


@dataclass(frozen=True, eq=False)
class DirectSumAlgebra(Algebra):
    name = "direct_sum"

    parts: Tuple[Algebra, ...]
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        flat = []
        for P in self.parts:
            flat.extend(P.parts if isinstance(P, DirectSumAlgebra) else [P])
        if len(flat) < 2:
            raise errors.ArityMismatch(f"a direct sum needs at least 2 parts, got {len(flat)}")
        # Summands share the tolerances of the sum
        object.__setattr__(self, "parts", tuple(P.with_tolerance(self.tol) for P in flat))

    @property
    def signature(self):
        return ("direct_sum", tuple(P.signature for P in self.parts))

    @property
    def dim(self):
        return sum(P.dim for P in self.parts)

    @property
    def blocks(self):
        return linalg.block_offsets([P.dim for P in self.parts])

    def order_margin(self, x):
        return min(P.order_margin(xi) for P, xi in zip(self.parts, x.payload))

    def _wrap(self, parts, clamped=None):
        parts = tuple(parts)
        if clamped is None:
            clamped = max(p.clamped for p in parts)
        return Effect(self.signature, parts, clamped)

    def _map(self, fn, *effects):
        return self._wrap(fn(P, *xs) for P, *xs in zip(self.parts, *(a.payload for a in effects)))

    def zero(self):
        return self._wrap(P.zero() for P in self.parts)

    def unit(self):
        return self._wrap(P.unit() for P in self.parts)

    def effect(self, payload):
        if isinstance(payload, Effect):
            if payload.signature != self.signature:
                raise errors.BackendMismatch(f"effect of {payload.signature} used with {self.signature}")
            return payload
        components = list(payload)
        if len(components) != len(self.parts):
            raise errors.ArityMismatch(f"expected {len(self.parts)} components, got {len(components)}")
        return self._wrap(P.effect(x) for P, x in zip(self.parts, components))

    def _add(self, a, b):
        return self._map(lambda P, x, y: P._add(x, y), a, b)

    def _sub(self, a, b):
        return self._map(lambda P, x, y: P._sub(x, y), a, b)

    def _scale(self, lam, a):
        return self._map(lambda P, x: P._scale(lam, x), a)

    def _seq(self, a, b):
        return self._map(lambda P, x, y: P._seq(x, y), a, b)

    def _clamp(self, a):
        return self._map(lambda P, x: P._clamp(x), a)

    def min_eig(self, a):
        return min(P.min_eig(x) for P, x in zip(self.parts, a.payload))

    def max_eig(self, a):
        return max(P.max_eig(x) for P, x in zip(self.parts, a.payload))

    def distance(self, a, b):
        return max(P.distance(x, y) for P, x, y in zip(self.parts, a.payload, b.payload))

    def commutator_norm(self, a, b):
        return max(P.commutator_norm(x, y) for P, x, y in zip(self.parts, a.payload, b.payload))

    def eigensystem(self, a):
        values, columns = [], []
        for P, x, block in zip(self.parts, a.payload, self.blocks):
            w, V = P.eigensystem(x)
            embedded = np.zeros((self.dim, V.shape[1]), dtype=complex)
            embedded[block] = V
            values.append(w)
            columns.append(embedded)
        return np.concatenate(values), np.concatenate(columns, axis=1)

    def functional_calculus(self, a, fn):
        return self._map(lambda P, x: P.functional_calculus(x, fn), a)

    def to_matrix(self, a):
        return scipy.linalg.block_diag(*(P.to_matrix(x) for P, x in zip(self.parts, a.payload))).astype(complex)

    def from_matrix(self, M, validate=True):
        M = np.asarray(M, dtype=complex)
        if validate:
            mask = scipy.linalg.block_diag(*(np.ones((P.dim, P.dim)) for P in self.parts))
            off = float(np.linalg.norm(M * (1 - mask)))
            if off > self.tol.eq:
                raise errors.BackendMismatch(f"matrix leaves the block structure (norm {off:.3e})", residual=off)
        return self._wrap(P.from_matrix(M[s, s], validate=validate) for P, s in zip(self.parts, self.blocks))

    """ States """

    def state(self, payload):
        if isinstance(payload, State):
            return payload
        weights, part_states = payload
        weights = np.asarray(weights, dtype=float).reshape(-1)
        part_states = list(part_states)
        if len(weights) != len(self.parts) or len(part_states) != len(self.parts):
            raise errors.ArityMismatch(f"expected {len(self.parts)} weights and part states")
        if weights.min() < -self.tol.eq or abs(weights.sum() - 1.0) > self.tol.eq:
            raise errors.NotConvex(f"weights {weights} are not convex coefficients")
        weights = np.clip(weights, 0.0, None)
        weights = weights / weights.sum()
        parts = tuple(P.state(s) for P, s in zip(self.parts, part_states))
        return State(self.signature, parts, weights)

    def maximally_mixed(self):
        weights = np.array([P.dim for P in self.parts], dtype=float)
        return State(self.signature, tuple(P.maximally_mixed() for P in self.parts), weights / weights.sum())

    def vector_state(self, v):
        v = np.asarray(v, dtype=complex)
        weights = np.array([np.vdot(v[s], v[s]).real for s in self.blocks])
        parts = tuple(
            P.vector_state(v[s]) if w > 0 else P.maximally_mixed()
            for P, s, w in zip(self.parts, self.blocks, weights)
        )
        return State(self.signature, parts, weights / weights.sum())

    def pair(self, state, a):
        return float(sum(
            w * pair(P, s, x) for P, w, s, x in zip(self.parts, state.weights, state.parts, a.payload) if w > 0
        ))

    def state_distance(self, s, t):
        dist = float(np.max(np.abs(s.weights - t.weights)))
        for P, w, x, y in zip(self.parts, s.weights, s.parts, t.parts):
            if w > self.tol.eq:
                dist = max(dist, P.state_distance(x, y))
        return dist

    def lueders(self, state, b):
        masses, parts = [], []
        for P, w, s, x in zip(self.parts, state.weights, state.parts, b.payload):
            conditioned, mass = P.lueders(s, x) if w > 0 else (None, 0.0)
            masses.append(w * mass)
            parts.append(conditioned if conditioned is not None else P.maximally_mixed())
        total = float(sum(masses))
        if total <= 0.0:
            return None, 0.0
        return State(self.signature, tuple(parts), np.array(masses) / total), total

    """ Sampling """

    def sample_effect(self, rng):
        return self._wrap(P.sample_effect(rng) for P in self.parts)

    def sample_sharp(self, rng):
        return self._wrap(P.sample_sharp(rng) for P in self.parts)

    def sample_one_dimensional(self, rng):
        sizes = np.array([P.dim for P in self.parts], dtype=float)
        k = rng.choice(len(self.parts), p=sizes / sizes.sum())
        return self._wrap(P.sample_one_dimensional(rng) if i == k else P.zero() for i, P in enumerate(self.parts))

    def sample_state(self, rng):
        weights = rng.dirichlet(np.ones(len(self.parts)))
        return State(self.signature, tuple(P.sample_state(rng) for P in self.parts), weights)


def direct_sum(parts, tol=None):
    parts = tuple(parts)
    if tol is None:
        tol = parts[0].tol if parts else ToleranceConfig()
    return DirectSumAlgebra(parts, tol=tol)


def ds_effect(E: DirectSumAlgebra, components) -> Effect:
    return E.effect(components)


def ds_project(E: DirectSumAlgebra, a: Effect, index: int) -> Effect:
    if index < 0 or index >= len(E.parts):
        raise errors.ArityMismatch(f"summand index {index} out of range for {len(E.parts)} parts")
    return a.parts[index]
