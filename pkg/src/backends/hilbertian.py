""" Hilbertian backend: operators 0 ≤ A ≤ I on C^d with A∘B = A^{1/2} B A^{1/2}, optionally restricted to the
algebra generated by a list of effects """
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.linalg

from src.effects import errors
from src.effects.core import Algebra, Effect, ToleranceConfig
from src.backends import linalg
from src.backends.states import State


@dataclass(frozen=True, eq=False)
class HilbertianAlgebra(Algebra):
    """E(C^d); with `generators` the sub-algebra they generate (membership is decided in src.structure)"""
    name = "hilbertian"

    d: int
    generators: Tuple = ()
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise errors.ArityMismatch(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        generators = tuple(
            self.effect(g.payload if isinstance(g, Effect) else g).payload for g in self.generators
        )
        object.__setattr__(self, "generators", generators)

    @property
    def signature(self):
        return ("hilbertian", self.d)

    @property
    def dim(self):
        return self.d

    @property
    def is_full(self):
        return len(self.generators) == 0

    def _wrap(self, A, clamped=0.0):
        return Effect(self.signature, np.asarray(A, dtype=complex), clamped)

    def zero(self):
        return self._wrap(np.zeros((self.d, self.d)))

    def unit(self):
        return self._wrap(np.eye(self.d))

    def effect(self, payload):
        if isinstance(payload, Effect):
            if payload.signature != self.signature:
                raise errors.BackendMismatch(f"effect of {payload.signature} used with {self.signature}")
            return payload
        M = np.asarray(payload, dtype=complex)
        if M.shape != (self.d, self.d):
            raise errors.ArityMismatch(f"expected a {self.d}x{self.d} matrix, got shape {M.shape}")
        skew = linalg.hermiticity_residual(M)
        if skew > self.tol.eq:
            raise errors.NotHermitian(f"‖M − M*‖ = {skew:.3e}", residual=skew)
        M = linalg.hermitize(M)
        w = scipy.linalg.eigvalsh(M)
        residual = max(-w[0], w[-1] - 1.0, 0.0)
        if residual > self.tol.psd:
            raise errors.OutOfInterval(
                f"eigenvalues [{w[0]:.6g}, {w[-1]:.6g}] leave [0, 1]", residual=residual
            )
        if residual > 0.0:
            M = linalg.eig_apply(M, lambda w: np.clip(w, 0.0, 1.0))
        return self._wrap(M, residual)

    def _add(self, a, b):
        return self._wrap(a.payload + b.payload)

    def _sub(self, a, b):
        return self._wrap(a.payload - b.payload)

    def _scale(self, lam, a):
        return self._wrap(lam * a.payload)

    def _seq(self, a, b):
        S = linalg.psd_sqrt(a.payload)
        return self._wrap(linalg.hermitize(S @ b.payload @ S))

    def _clamp(self, a):
        w = scipy.linalg.eigvalsh(a.payload)
        moved = max(-w[0], w[-1] - 1.0, 0.0)
        if moved == 0.0:
            return a
        return self._wrap(linalg.eig_apply(a.payload, lambda w: np.clip(w, 0.0, 1.0)), max(moved, a.clamped))

    def min_eig(self, a):
        return float(scipy.linalg.eigvalsh(linalg.hermitize(a.payload))[0])

    def max_eig(self, a):
        return float(scipy.linalg.eigvalsh(linalg.hermitize(a.payload))[-1])

    def distance(self, a, b):
        return float(np.linalg.norm(a.payload - b.payload))

    def commutator_norm(self, a, b):
        A, B = a.payload, b.payload
        return float(np.linalg.norm(A @ B - B @ A, 2))

    def eigensystem(self, a):
        w, V = scipy.linalg.eigh(linalg.hermitize(a.payload))
        V = np.stack([linalg.phase_normalize(v, self.tol.cluster) for v in V.T], axis=1)
        return w, V

    def functional_calculus(self, a, fn):
        return self._wrap(linalg.eig_apply(a.payload, lambda w: np.clip(fn(w), 0.0, 1.0)))

    def to_matrix(self, a):
        return np.array(a.payload, dtype=complex)

    def from_matrix(self, M, validate=True):
        if validate:
            return self.effect(M)
        return self._wrap(linalg.hermitize(M))

    """ States """

    def state(self, payload):
        if isinstance(payload, State):
            return payload
        rho = np.asarray(payload, dtype=complex)
        if rho.shape != (self.d, self.d):
            raise errors.ArityMismatch(f"expected a {self.d}x{self.d} density matrix, got shape {rho.shape}")
        skew = linalg.hermiticity_residual(rho)
        if skew > self.tol.eq:
            raise errors.NotHermitian(f"density matrix is not Hermitian (‖ρ − ρ*‖ = {skew:.3e})", residual=skew)
        rho = linalg.hermitize(rho)
        w = scipy.linalg.eigvalsh(rho)
        trace = float(np.trace(rho).real)
        if w[0] < -self.tol.eq or abs(trace - 1.0) > self.tol.eq:
            raise errors.NotConvex(f"not a density matrix (min eigenvalue {w[0]:.3e}, trace {trace:.12f})")
        if w[0] < 0.0:
            rho = linalg.eig_apply(rho, lambda w: np.clip(w, 0.0, None))
        return State(self.signature, rho / np.trace(rho).real)

    def maximally_mixed(self):
        return State(self.signature, np.eye(self.d, dtype=complex) / self.d)

    def vector_state(self, v):
        v = np.asarray(v, dtype=complex)
        return State(self.signature, linalg.projector(v / np.linalg.norm(v)))

    def pair(self, state, a):
        # tr(ρ A)
        return float(np.real(np.sum(state.payload * a.payload.T)))

    def state_distance(self, s, t):
        return float(np.linalg.norm(s.payload - t.payload))

    def lueders(self, state, b):
        """ρ ↦ B^{1/2} ρ B^{1/2} / tr(ρB); returns (state or None, tr(ρB))"""
        S = linalg.psd_sqrt(b.payload)
        rho = linalg.hermitize(S @ state.payload @ S)
        mass = float(np.trace(rho).real)
        if mass <= 0.0:
            return None, 0.0
        return State(self.signature, rho / mass), mass

    """ Sampling """

    def _sample_member(self, rng):
        # Affine image of a random real combination of the generators stays inside the generated algebra
        X = sum(r * G for r, G in zip(rng.standard_normal(len(self.generators)), self.generators))
        w = scipy.linalg.eigvalsh(X)
        scale = rng.uniform()
        if w[-1] - w[0] <= self.tol.cluster:
            return self._wrap(scale * np.eye(self.d))
        return self._wrap(linalg.hermitize(scale * (X - w[0] * np.eye(self.d)) / (w[-1] - w[0])))

    def sample_effect(self, rng):
        if not self.is_full:
            return self._sample_member(rng)
        U = linalg.haar_unitary(rng, self.d)
        return self._wrap(linalg.hermitize((U * rng.uniform(size=self.d)) @ U.conj().T))

    def sample_sharp(self, rng):
        if not self.is_full:
            threshold = rng.uniform()
            return self.functional_calculus(self._sample_member(rng), lambda w: (w >= threshold).astype(float))
        U = linalg.haar_unitary(rng, self.d)
        mask = rng.integers(0, 2, size=self.d).astype(float)
        return self._wrap(linalg.hermitize((U * mask) @ U.conj().T))

    def sample_one_dimensional(self, rng):
        if not self.is_full:
            w, V = self.eigensystem(self._sample_member(rng))
            return self._wrap(linalg.projector(V[:, -1]))
        return self._wrap(linalg.projector(linalg.haar_unitary(rng, self.d)[:, 0]))

    def sample_state(self, rng):
        G = rng.standard_normal((self.d, self.d)) + 1j * rng.standard_normal((self.d, self.d))
        rho = G @ G.conj().T
        return State(self.signature, linalg.hermitize(rho / np.trace(rho).real))


def make_hilbertian_effect(d, M, tol=None):
    return HilbertianAlgebra(d, tol=tol or ToleranceConfig()).effect(M)
