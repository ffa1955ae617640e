""" Classical backend: fuzzy events on a finite sample space, i.e. vectors in [0,1]^n with pointwise operations """
from dataclasses import dataclass, field

import numpy as np

from src.effects import errors
from src.effects.core import Algebra, Effect, ToleranceConfig
from src.backends.states import State


@dataclass(frozen=True, eq=False)
class ClassicalAlgebra(Algebra):
    name = "classical"

    n: int
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise errors.ArityMismatch(f"outcome count must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def signature(self):
        return ("classical", self.n)

    @property
    def dim(self):
        return self.n

    @property
    def order_tol(self):
        return self.tol.eq

    def _wrap(self, v, clamped=0.0):
        return Effect(self.signature, np.asarray(v, dtype=float), clamped)

    def zero(self):
        return self._wrap(np.zeros(self.n))

    def unit(self):
        return self._wrap(np.ones(self.n))

    def effect(self, payload):
        if isinstance(payload, Effect):
            if payload.signature != self.signature:
                raise errors.BackendMismatch(f"effect of {payload.signature} used with {self.signature}")
            return payload
        v = np.asarray(payload)
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag), initial=0.0) > self.tol.eq:
                raise errors.OutOfInterval("classical effects are real")
            v = v.real
        v = v.astype(float).reshape(-1)
        if v.shape != (self.n,):
            raise errors.ArityMismatch(f"expected {self.n} entries, got {v.size}")
        residual = max(-v.min(), v.max() - 1.0, 0.0)
        if residual > self.tol.eq:
            raise errors.OutOfInterval(f"entries leave [0, 1] by {residual:.3e}", residual=residual)
        return self._wrap(np.clip(v, 0.0, 1.0), residual)

    def _add(self, a, b):
        return self._wrap(a.payload + b.payload)

    def _sub(self, a, b):
        return self._wrap(a.payload - b.payload)

    def _scale(self, lam, a):
        return self._wrap(lam * a.payload)

    def _seq(self, a, b):
        return self._wrap(a.payload * b.payload)

    def _clamp(self, a):
        v = a.payload
        moved = max(-v.min(), v.max() - 1.0, 0.0)
        if moved == 0.0:
            return a
        return self._wrap(np.clip(v, 0.0, 1.0), max(moved, a.clamped))

    def min_eig(self, a):
        return float(a.payload.min())

    def max_eig(self, a):
        return float(a.payload.max())

    def distance(self, a, b):
        return float(np.max(np.abs(a.payload - b.payload)))

    def commutator_norm(self, a, b):
        return 0.0

    def eigensystem(self, a):
        # Outcome order; the point indicators are the only context
        return np.array(a.payload, dtype=float), np.eye(self.n, dtype=complex)

    def functional_calculus(self, a, fn):
        return self._wrap(np.clip(fn(np.array(a.payload)), 0.0, 1.0))

    def to_matrix(self, a):
        return np.diag(a.payload).astype(complex)

    def from_matrix(self, M, validate=True):
        M = np.asarray(M, dtype=complex)
        diagonal = np.real(np.diag(M))
        if validate:
            off = float(np.linalg.norm(M - np.diag(np.diag(M))))
            if off > self.tol.eq:
                raise errors.BackendMismatch(f"matrix is not diagonal (off-diagonal norm {off:.3e})", residual=off)
            return self.effect(diagonal)
        return self._wrap(diagonal)

    """ States """

    def state(self, payload):
        if isinstance(payload, State):
            return payload
        p = np.asarray(payload, dtype=float).reshape(-1)
        if p.shape != (self.n,):
            raise errors.ArityMismatch(f"expected {self.n} probabilities, got {p.size}")
        if p.min() < -self.tol.eq or abs(p.sum() - 1.0) > self.tol.eq:
            raise errors.NotConvex(f"not a probability vector (min {p.min():.3e}, sum {p.sum():.12f})")
        p = np.clip(p, 0.0, None)
        return State(self.signature, p / p.sum())

    def maximally_mixed(self):
        return State(self.signature, np.full(self.n, 1.0 / self.n))

    def vector_state(self, v):
        p = np.abs(np.asarray(v)) ** 2
        return State(self.signature, p / p.sum())

    def pair(self, state, a):
        return float(np.dot(state.payload, a.payload))

    def state_distance(self, s, t):
        return float(np.max(np.abs(s.payload - t.payload)))

    def lueders(self, state, b):
        """Bayes reweighting p ↦ b·p / ω(b); returns (state or None, ω(b))"""
        q = state.payload * b.payload
        mass = float(q.sum())
        if mass <= 0.0:
            return None, 0.0
        return State(self.signature, np.clip(q / mass, 0.0, None)), mass

    """ Sampling """

    def sample_effect(self, rng):
        return self._wrap(rng.uniform(size=self.n))

    def sample_sharp(self, rng):
        return self._wrap(rng.integers(0, 2, size=self.n).astype(float))

    def sample_one_dimensional(self, rng):
        return self._wrap(np.eye(self.n)[rng.integers(self.n)])

    def sample_state(self, rng):
        return State(self.signature, rng.dirichlet(np.ones(self.n)))


def make_classical_effect(n, v, tol=None):
    return ClassicalAlgebra(n, tol=tol or ToleranceConfig()).effect(v)
