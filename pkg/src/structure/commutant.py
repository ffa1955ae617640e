""" Commutants and centers, computed as kernels of the vectorized commutator map over the real span of the
generated algebra (all matrices live in the block-diagonal embedding of the backend) """
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from opt_einsum import contract

from src.effects.core import Algebra, Effect, check_same, commutes
from src.backends import linalg
from src.backends.sums import DirectSumAlgebra
from src.utils.run import get_logger

log = get_logger(__name__)


def hermitian_basis(d):
    """Frobenius-orthonormal basis of the d x d Hermitian matrices (d² elements)"""
    basis = []
    for j in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[j, j] = 1.0
        basis.append(E)
    for j in range(d):
        for k in range(j + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[j, k] = S[k, j] = 1 / np.sqrt(2)
            A = np.zeros((d, d), dtype=complex)
            A[j, k], A[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            basis += [S, A]
    return np.array(basis).reshape(-1, d, d)


def _closure(generators, d, rank_tol, max_rounds=None):
    """Real span of the unital algebra generated by Hermitian matrices: close the span under the Jordan product
    (XY + YX)/2 and i[X, Y] until its dimension is stable"""
    span = linalg.orthonormal_span(np.concatenate([np.eye(d, dtype=complex)[None], generators]), rank_tol)
    for _ in range(max_rounds or d * d):
        products = [span]
        for i, X in enumerate(span):
            for Y in span[i:]:
                products.append(((X @ Y + Y @ X) / 2)[None])
                products.append((1j * (X @ Y - Y @ X))[None])
        grown = linalg.orthonormal_span(np.concatenate(products), rank_tol)
        if len(grown) == len(span):
            return grown
        span = grown
    return span


def algebra_span(E: Algebra) -> np.ndarray:
    """Orthonormal real basis (k, dim, dim) of the Hermitian span of E inside its matrix embedding"""
    if E.name == "classical":
        return np.array([np.diag(row) for row in np.eye(E.n, dtype=complex)])
    if E.name == "hilbertian":
        if E.is_full:
            return hermitian_basis(E.d)
        return _closure(np.array(E.generators), E.d, E.tol.rank)
    if isinstance(E, DirectSumAlgebra):
        basis = []
        for P, block in zip(E.parts, E.blocks):
            for X in algebra_span(P):
                M = np.zeros((E.dim, E.dim), dtype=complex)
                M[block, block] = X
                basis.append(M)
        return np.array(basis)
    raise NotImplementedError(f"no span for backend {E.name}")


def atomic_blocks(E: Algebra) -> List[slice]:
    """Finest coordinate blocks that effects of E never mix: single outcomes for classical algebras"""
    if E.name == "classical":
        return linalg.block_offsets([1] * E.n)
    if isinstance(E, DirectSumAlgebra):
        blocks = []
        for P, block in zip(E.parts, E.blocks):
            blocks += [slice(block.start + s.start, block.start + s.stop) for s in atomic_blocks(P)]
        return blocks
    return [slice(0, E.dim)]


@dataclass(frozen=True, eq=False)
class CommutantBasis:
    """Orthonormal Hermitian matrices spanning a commutant, with the generating set and rank cutoff used.

    For a classical algebra `partition` holds the outcome classes cut out by the level sets of the generators.
    """
    matrices: np.ndarray
    generators: np.ndarray
    rank_cutoff: float
    partition: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __len__(self):
        return len(self.matrices)

    @property
    def dim(self):
        return len(self.matrices)

    def max_commutator(self):
        """Largest ‖[X, A]‖ over members X and generators A"""
        return max(
            (float(np.linalg.norm(X @ A - A @ X)) for X in self.matrices for A in self.generators),
            default=0.0,
        )

    def contains(self, M, tol):
        """Whether M lies in the span, up to a Frobenius residual of `tol`"""
        M = np.asarray(M, dtype=complex)
        if self.dim == 0:
            return float(np.linalg.norm(M)) <= tol
        coefficients = np.real(contract("kij,ij->k", self.matrices.conj(), M))
        residual = M - contract("k,kij->ij", coefficients, self.matrices)
        return float(np.linalg.norm(residual)) <= tol


def _level_partition(generators, n, tol):
    """Outcome classes on which every diagonal generator is constant (up to the cluster gap)"""
    labels = np.zeros((n, 0))
    for G in generators:
        _, groups = linalg.cluster_values(np.real(np.diag(G)), tol)
        column = np.zeros(n)
        for label, g in enumerate(groups):
            column[g] = label
        labels = np.concatenate([labels, column[:, None]], axis=1)
    classes = {}
    for i in range(n):
        classes.setdefault(tuple(labels[i]), []).append(i)
    return tuple(sorted(tuple(c) for c in classes.values()))


def _commutant(E: Algebra, span, generators) -> CommutantBasis:
    """Members X = Σ c_k B_k of the span with [X, A] = 0 for every generator A"""
    generators = np.asarray(generators, dtype=complex).reshape(-1, E.dim, E.dim)
    if len(generators) == 0 or len(span) == 0:
        return CommutantBasis(np.array(span), generators, E.tol.rank)
    # Rows: real and imaginary parts of every commutator entry; columns: span coefficients
    system = np.concatenate(
        [linalg.vectorize(np.array([B @ A - A @ B for B in span])) for A in generators], axis=0
    )
    kernel = scipy.linalg.null_space(system, rcond=E.tol.rank)
    matrices = contract("kr,kij->rij", kernel, span) if kernel.size else np.zeros((0, E.dim, E.dim), complex)
    matrices = np.array([linalg.hermitize(X) for X in matrices]).reshape(-1, E.dim, E.dim)
    log.debug(f"commutant of {len(generators)} generators in a span of {len(span)}: dimension {len(matrices)}")
    return CommutantBasis(matrices, generators, E.tol.rank)


def in_commutant(E: Algebra, b: Effect, F) -> bool:
    """b commutes with every member of F"""
    F = list(F)
    check_same(E, b, *F)
    return all(commutes(E, b, a) for a in F)


def commutant_basis(E: Algebra, F) -> CommutantBasis:
    """Basis of {X in span(E) : XA = AX for all A in F}; for the full Hilbertian algebra this is the Hermitian
    solution space of the stacked commutator equations"""
    F = list(F)
    check_same(E, *F)
    generators = np.array([E.to_matrix(a) for a in F]).reshape(-1, E.dim, E.dim)
    basis = _commutant(E, algebra_span(E), generators)
    if E.name == "classical":
        partition = _level_partition(generators, E.n, E.tol.cluster)
        return CommutantBasis(basis.matrices, generators, E.tol.rank, partition)
    return basis


def center_basis(E: Algebra) -> CommutantBasis:
    """The center: members of the span commuting with the whole span"""
    span = algebra_span(E)
    basis = _commutant(E, span, span)
    if E.name == "classical":
        return CommutantBasis(basis.matrices, span, E.tol.rank, tuple((i,) for i in range(E.n)))
    return basis


def is_factor(E: Algebra) -> bool:
    """Only scalar multiples of the unit are central"""
    return center_basis(E).dim == 1
