""" Central splits and the decomposition of an algebra into factors.

A central sharp z carves the algebra {z∘b : b ∈ E}, realized concretely on the range of z: with V an isometry onto
range(z), z∘b corresponds to the compression V* B V. Minimal central sharps come from the spectral projections of a
generic element of the center.
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import scipy.linalg
from opt_einsum import contract

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same, complement, equal, is_zero, seq
from src.backends import linalg
from src.backends.classical import ClassicalAlgebra
from src.backends.contexts import is_sharp
from src.backends.hilbertian import HilbertianAlgebra
from src.backends.sums import direct_sum
from src.structure.commutant import algebra_span, center_basis
from src.utils.run import get_logger

log = get_logger(__name__)


def range_isometry(Z, tol):
    """Orthonormal columns spanning the range of a projection; standard basis columns when Z is diagonal"""
    Z = np.asarray(Z, dtype=complex)
    if float(np.linalg.norm(Z - np.diag(np.diag(Z)))) <= tol:
        idx = np.flatnonzero(np.real(np.diag(Z)) > 0.5)
        return np.eye(Z.shape[0], dtype=complex)[:, idx]
    w, V = scipy.linalg.eigh(linalg.hermitize(Z))
    return np.stack([linalg.phase_normalize(v, tol) for v in V[:, w > 0.5].T], axis=1)


def _normalized_generator(X, tol):
    w = scipy.linalg.eigvalsh(X)
    if w[-1] - w[0] <= tol:
        return None
    return linalg.hermitize((X - w[0] * np.eye(len(X))) / (w[-1] - w[0]))


def carve_algebra(E: Algebra, V) -> Algebra:
    """The algebra compressed onto range(V): classical when the compressed span is diagonal and commutative,
    the full Hilbertian algebra when it has r² dimensions, otherwise the Hilbertian algebra it generates"""
    r = V.shape[1]
    compressed = np.array([V.conj().T @ X @ V for X in algebra_span(E)])
    basis = linalg.orthonormal_span(compressed, E.tol.rank)
    if r == 1:
        return ClassicalAlgebra(1, tol=E.tol)
    if len(basis) == r * r:
        return HilbertianAlgebra(r, tol=E.tol)
    off_diagonal = max(float(np.linalg.norm(X - np.diag(np.diag(X)))) for X in basis)
    if len(basis) == r and off_diagonal <= E.tol.eq:
        return ClassicalAlgebra(r, tol=E.tol)
    generators = [G for G in (_normalized_generator(X, E.tol.cluster) for X in basis) if G is not None]
    return HilbertianAlgebra(r, generators=tuple(generators), tol=E.tol)


@dataclass(frozen=True, eq=False)
class Carving:
    """Central sharps z_1, …, z_k summing to the unit, with the carved algebras and the isometries onto the ranges.

    `carve` is the map b ↦ (z_1∘b, …, z_k∘b) and `assemble` its inverse.
    """
    algebra: Algebra
    sharps: Tuple[Effect, ...]
    isometries: Tuple[np.ndarray, ...]
    factors: Tuple[Algebra, ...]

    @property
    def dims(self):
        return tuple(F.dim for F in self.factors)

    def carve(self, b: Effect) -> Tuple[Effect, ...]:
        E = self.algebra
        check_same(E, b)
        components = []
        for z, V, F in zip(self.sharps, self.isometries, self.factors):
            M = V.conj().T @ E.to_matrix(seq(E, z, b)) @ V
            components.append(F._clamp(F.from_matrix(M, validate=False)))
        return tuple(components)

    def assemble(self, components) -> Effect:
        E = self.algebra
        components = tuple(components)
        if len(components) != len(self.factors):
            raise errors.ArityMismatch(f"expected {len(self.factors)} components, got {len(components)}")
        M = sum(V @ F.to_matrix(c) @ V.conj().T for V, F, c in zip(self.isometries, self.factors, components))
        return E._clamp(E.from_matrix(M, validate=False))

    def direct_sum(self) -> Algebra:
        if len(self.factors) == 1:
            return self.factors[0]
        return direct_sum(self.factors, tol=self.algebra.tol)

    def verify(self, panel) -> Dict[str, float]:
        """Residuals of the carving map on a panel of effects: partition of the unit, unit preservation,
        additivity on the orthogonal pairs (b_i/2, b_{i+1}/2), and reconstruction b = ⊕ z_i∘b"""
        E = self.algebra
        panel = list(panel)
        total = E.from_matrix(sum(E.to_matrix(z) for z in self.sharps), validate=False)
        residuals = {
            "partition": max(
                [E.distance(total, E.unit())]
                + [E.distance(seq(E, x, y), E.zero()) for i, x in enumerate(self.sharps) for y in self.sharps[i + 1:]]
            ),
            "unit": max(F.distance(c, F.unit()) for F, c in zip(self.factors, self.carve(E.unit()))),
            "reconstruction": max((E.distance(self.assemble(self.carve(b)), b) for b in panel), default=0.0),
            "additivity": 0.0,
        }
        for b, c in zip(panel[:-1], panel[1:]):
            x, y = E._scale(0.5, b), E._scale(0.5, c)
            joint, left, right = self.carve(E._add(x, y)), self.carve(x), self.carve(y)
            residuals["additivity"] = max(
                [residuals["additivity"]]
                + [F.distance(j, F._add(l, r)) for F, j, l, r in zip(self.factors, joint, left, right)]
            )
        return residuals


@dataclass(frozen=True, eq=False)
class CentralSplit(Carving):
    """E ≅ E₁ ⊕ E₂ along a central sharp a, with units a and a′"""

    @property
    def sharp(self):
        return self.sharps[0]

    @property
    def first(self):
        return self.factors[0]

    @property
    def second(self):
        return self.factors[1]

    def apply(self, b: Effect) -> Tuple[Effect, Effect]:
        return self.carve(b)

    def reconstruct(self, parts) -> Effect:
        return self.assemble(parts)


@dataclass(frozen=True, eq=False)
class FactorDecomposition(Carving):
    """Minimal central sharps and the factors they carve"""

    def verify(self, panel) -> Dict[str, float]:
        residuals = super().verify(panel)
        # Central dimensions beyond the scalars, summed over factors
        residuals["factor_centers"] = float(sum(center_basis(F).dim - 1 for F in self.factors))
        return residuals


def central_residual(E: Algebra, a: Effect) -> float:
    """Largest commutator of a with the span of E"""
    A = E.to_matrix(a)
    return max(float(np.linalg.norm(A @ X - X @ A)) for X in algebra_span(E))


def central_split(E: Algebra, a: Effect) -> CentralSplit:
    check_same(E, a)
    if not is_sharp(E, a):
        raise errors.NotSharp("a central split needs a sharp effect")
    residual = central_residual(E, a)
    if residual > E.tol.eq:
        raise errors.NotCentral(f"a does not commute with the algebra (commutator {residual:.3e})", residual=residual)
    if is_zero(E, a) or equal(E, a, E.unit()):
        raise errors.TrivialSplit("splitting along 0 or 1 is trivial")
    sharps = (a, complement(E, a))
    isometries = tuple(range_isometry(E.to_matrix(z), E.tol.eq) for z in sharps)
    return CentralSplit(E, sharps, isometries, tuple(carve_algebra(E, V) for V in isometries))


def minimal_central_sharps(E: Algebra, seed=0, retries=5) -> List[Effect]:
    """Spectral projections of a random element of the center; the number of eigenvalue clusters must equal the
    dimension of the center, otherwise new coefficients are drawn"""
    center = center_basis(E)
    if center.dim <= 1:
        return [E.unit()]
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        X = linalg.hermitize(contract("k,kij->ij", rng.standard_normal(center.dim), center.matrices))
        w, V = scipy.linalg.eigh(X)
        _, groups = linalg.cluster_values(w, E.tol.cluster)
        if len(groups) == center.dim:
            projections = [linalg.hermitize(V[:, g] @ V[:, g].conj().T) for g in groups]
            projections.sort(key=lambda Z: linalg.leading_index(Z, E.tol.cluster))
            return [E._clamp(E.from_matrix(Z, validate=False)) for Z in projections]
        log.info(f"generic central element gave {len(groups)} clusters for a center of dimension {center.dim}, "
                 f"retrying ({attempt + 1}/{retries})")
    raise errors.DegenerateGeneric(f"no generic central element found after {retries} draws")


def factorize(E: Algebra, seed=0, retries=5) -> FactorDecomposition:
    sharps = tuple(minimal_central_sharps(E, seed=seed, retries=retries))
    isometries = tuple(range_isometry(E.to_matrix(z), E.tol.eq) for z in sharps)
    factors = tuple(carve_algebra(E, V) for V in isometries)
    log.debug(f"factorized {E.signature} into dimensions {[F.dim for F in factors]}")
    return FactorDecomposition(E, sharps, isometries, factors)
