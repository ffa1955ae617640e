""" Backend-independent effect-algebra interface: the Effect value, the Algebra base class, and the operations
⊕, ′, ⊖, scalar multiplication, order and sequential product built on top of the backend primitives.
"""
import abc
from dataclasses import dataclass, replace
from typing import Any, Callable, Tuple

import numpy as np
from opt_einsum import contract

from src.effects import errors

DEFAULT_TOLERANCE = dict(eq=1e-9, psd=1e-9, cluster=1e-7, rank=1e-10)


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds

    eq: effect/scalar equality (Frobenius or max-abs)
    psd: eigenvalue floor when deciding the operator order
    cluster: gap separating distinct eigenvalues
    rank: relative singular value cutoff for kernels and spans
    """
    eq: float = DEFAULT_TOLERANCE["eq"]
    psd: float = DEFAULT_TOLERANCE["psd"]
    cluster: float = DEFAULT_TOLERANCE["cluster"]
    rank: float = DEFAULT_TOLERANCE["rank"]

    def __post_init__(self):
        for key in ("eq", "psd", "cluster", "rank"):
            value = getattr(self, key)
            if not (np.isfinite(value) and value > 0):
                raise errors.InvalidTolerance(f"tolerance {key}={value} must be strictly positive")
        if self.cluster <= self.eq:
            raise errors.InvalidTolerance(
                f"cluster gap {self.cluster} must exceed the equality tolerance {self.eq}"
            )

    @classmethod
    def from_config(cls, config=None, **overrides):
        """Build from any mapping (dict, DictConfig) with a subset of the keys; unknown keys are rejected"""
        values = dict(DEFAULT_TOLERANCE)
        for source in (config or {}), overrides:
            for key, value in dict(source).items():
                if key not in DEFAULT_TOLERANCE:
                    raise errors.InvalidTolerance(f"unknown tolerance '{key}'")
                values[key] = float(value)
        return cls(**values)

    def to_dict(self):
        return dict(eq=self.eq, psd=self.psd, cluster=self.cluster, rank=self.rank)


def _freeze(x):
    if isinstance(x, np.ndarray):
        x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class Effect:
    """An element of an algebra.

    payload is a probability vector (classical), a Hermitian matrix (Hilbertian) or a tuple of part Effects
    (direct sum). `clamped` records how far validation had to move eigenvalues back into [0, 1].
    """
    signature: Tuple
    payload: Any
    clamped: float = 0.0

    def __post_init__(self):
        _freeze(self.payload)

    @property
    def backend(self):
        return self.signature[0]

    @property
    def parts(self):
        if not isinstance(self.payload, tuple):
            raise errors.BackendMismatch(f"{self.backend} effect has no parts")
        return self.payload

    def __repr__(self):
        if isinstance(self.payload, tuple):
            inner = ", ".join(repr(p) for p in self.payload)
            return f"Effect[{self.backend}]({inner})"
        return f"Effect[{self.backend}]({np.array2string(np.asarray(self.payload), precision=4)})"


class Algebra(abc.ABC):
    """Backend descriptor. Subclasses implement the primitives below on payloads of their own kind; the checked
    effect-algebra operations are the module-level functions of this file.

    Every backend exposes a block-diagonal matrix embedding (`to_matrix` / `from_matrix`) of size `dim`, in which
    contexts carry their representative unit vectors.
    """
    # Backend tag; documents select backends by this name through src.utils.registry.backend
    name = None

    tol: ToleranceConfig

    @property
    @abc.abstractmethod
    def signature(self) -> Tuple:
        """Hashable description of the algebra, shared by all of its effects"""

    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """Size of the block-diagonal matrix embedding"""

    @property
    def context_size(self) -> int:
        """Cardinality of every context"""
        return self.dim

    @property
    def order_tol(self) -> float:
        return self.tol.psd

    def order_margin(self, x) -> float:
        """Non-negative iff x is positive semidefinite up to the order tolerance"""
        return self.min_eig(x) + self.order_tol

    def with_tolerance(self, tol):
        return replace(self, tol=tol)

    # Constructors
    @abc.abstractmethod
    def zero(self) -> Effect: ...

    @abc.abstractmethod
    def unit(self) -> Effect: ...

    @abc.abstractmethod
    def effect(self, payload) -> Effect:
        """Validate a raw payload, clamp it into the unit interval and wrap it"""

    # Unchecked primitives
    @abc.abstractmethod
    def _add(self, a, b) -> Effect: ...

    @abc.abstractmethod
    def _sub(self, a, b) -> Effect: ...

    @abc.abstractmethod
    def _scale(self, lam, a) -> Effect: ...

    @abc.abstractmethod
    def _seq(self, a, b) -> Effect: ...

    @abc.abstractmethod
    def _clamp(self, a) -> Effect:
        """Project eigenvalues back into [0, 1], recording the magnitude moved"""

    @abc.abstractmethod
    def min_eig(self, a) -> float: ...

    @abc.abstractmethod
    def max_eig(self, a) -> float: ...

    @abc.abstractmethod
    def distance(self, a, b) -> float: ...

    @abc.abstractmethod
    def commutator_norm(self, a, b) -> float: ...

    @abc.abstractmethod
    def eigensystem(self, a):
        """Raw eigenvalues (ascending within each block) and unit eigenvectors as columns of a dim x context_size
        matrix in the embedding; columns never mix blocks."""

    @abc.abstractmethod
    def functional_calculus(self, a, fn: Callable) -> Effect:
        """Apply fn: [0,1] -> [0,1] to the eigenvalues of a"""

    @abc.abstractmethod
    def to_matrix(self, a) -> np.ndarray: ...

    @abc.abstractmethod
    def from_matrix(self, M, validate=True) -> Effect: ...

    @abc.abstractmethod
    def pair(self, state, a) -> float:
        """State evaluation ω(a) without checks"""

    def combine(self, vectors, coefficients) -> Effect:
        """The effect Σ c_i P(v_i) for embedding vectors v_i (columns)"""
        vectors = np.asarray(vectors, dtype=complex)
        coefficients = np.asarray(coefficients, dtype=float)
        M = contract("ik,k,jk->ij", vectors, coefficients, vectors.conj())
        return self.from_matrix(M, validate=False)

    def rank(self, a) -> int:
        values, _ = self.eigensystem(a)
        return int(np.sum(values > self.tol.cluster))

    # Sampling hooks used by src.effects.sampling
    @abc.abstractmethod
    def sample_effect(self, rng) -> Effect: ...

    @abc.abstractmethod
    def sample_sharp(self, rng) -> Effect: ...

    @abc.abstractmethod
    def sample_one_dimensional(self, rng) -> Effect: ...

    @abc.abstractmethod
    def sample_state(self, rng): ...


def check_same(E: Algebra, *effects):
    for a in effects:
        if not isinstance(a, Effect) or a.signature != E.signature:
            got = a.signature if isinstance(a, Effect) else type(a).__name__
            raise errors.BackendMismatch(f"effect of {got} used with algebra {E.signature}")


""" Checked operations """


def complement(E: Algebra, a: Effect) -> Effect:
    check_same(E, a)
    return E._sub(E.unit(), a)


def orthogonality_residual(E: Algebra, a: Effect, b: Effect) -> float:
    """How far a + b leaves the unit interval from above, beyond tolerance (0 when a ⊥ b)"""
    return max(0.0, -E.order_margin(E._sub(E.unit(), E._add(a, b))))


def orthogonal(E: Algebra, a: Effect, b: Effect) -> bool:
    check_same(E, a, b)
    return orthogonality_residual(E, a, b) <= 0.0


def oplus(E: Algebra, a: Effect, b: Effect) -> Effect:
    check_same(E, a, b)
    residual = orthogonality_residual(E, a, b)
    if residual > 0.0:
        raise errors.NotOrthogonal(f"a + b exceeds the unit by {residual:.3e} beyond tolerance", residual=residual)
    # Near-boundary sums are accepted and clamped back under the unit
    return E._clamp(E._add(a, b))


def le(E: Algebra, a: Effect, b: Effect) -> bool:
    check_same(E, a, b)
    return E.order_margin(E._sub(b, a)) >= 0.0


def ominus(E: Algebra, b: Effect, c: Effect) -> Effect:
    """b ⊖ c = (c ⊕ b′)′ for c ≤ b"""
    check_same(E, b, c)
    if not le(E, c, b):
        residual = -E.order_margin(E._sub(b, c))
        raise errors.NotDominated(f"c exceeds b beyond tolerance by {residual:.3e}", residual=residual)
    return complement(E, oplus(E, c, complement(E, b)))


def scalar(E: Algebra, lam: float, a: Effect) -> Effect:
    check_same(E, a)
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise errors.ScalarOutOfRange(f"scalar {lam} outside [0, 1]", residual=max(-lam, lam - 1.0))
    return E._scale(lam, a)


def seq(E: Algebra, a: Effect, b: Effect) -> Effect:
    check_same(E, a, b)
    return E._seq(a, b)


def commutes(E: Algebra, a: Effect, b: Effect) -> bool:
    check_same(E, a, b)
    return E.commutator_norm(a, b) <= E.tol.eq


def commutes_by_seq(E: Algebra, a: Effect, b: Effect) -> bool:
    """Generic criterion a∘b = b∘a, kept for cross-validating the backend shortcut"""
    return distance(E, seq(E, a, b), seq(E, b, a)) <= E.tol.eq


def distance(E: Algebra, a: Effect, b: Effect) -> float:
    check_same(E, a, b)
    return E.distance(a, b)


def equal(E: Algebra, a: Effect, b: Effect) -> bool:
    return distance(E, a, b) <= E.tol.eq


def is_zero(E: Algebra, a: Effect) -> bool:
    return equal(E, a, E.zero())
