""" Joint contexts of commuting effects and the atoms of the commutative algebra they generate.

Atoms are refined one effect at a time: each atom's range is compressed against the next effect and split along
the eigenvalue clusters of the compression, the same recursion used to simultaneously diagonalize commuting
Hermitian matrices.
"""
from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.linalg

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same
from src.backends import linalg
from src.backends.contexts import (
    Context, context_coefficients, context_from_vectors, context_residual, is_one_dimensional, support_vector,
)
from src.structure.commutant import atomic_blocks
from src.structure.factors import range_isometry
from src.utils.run import get_logger

log = get_logger(__name__)


def _check_commuting(E: Algebra, F):
    for i, a in enumerate(F):
        for b in F[i + 1:]:
            residual = E.commutator_norm(a, b)
            if residual > E.tol.eq:
                raise errors.NotCommuting(f"commutator norm {residual:.3e}", residual=residual)


def simultaneous_atoms(E: Algebra, F) -> List[Effect]:
    """Minimal sharp elements of the commutative algebra generated by the pairwise commuting set F"""
    F = list(F)
    check_same(E, *F)
    _check_commuting(E, F)
    atoms = [np.eye(E.dim, dtype=complex)]
    for a in F:
        A = E.to_matrix(a)
        refined = []
        for Z in atoms:
            V = range_isometry(Z, E.tol.eq)
            w, W = scipy.linalg.eigh(linalg.hermitize(V.conj().T @ A @ V))
            _, groups = linalg.cluster_values(w, E.tol.cluster)
            for g in groups:
                U = V @ W[:, g]
                refined.append(linalg.hermitize(U @ U.conj().T))
        atoms = refined
    atoms.sort(key=lambda Z: linalg.leading_index(Z, E.tol.cluster))
    return [E._clamp(E.from_matrix(Z, validate=False)) for Z in atoms]


def _refine(E: Algebra, Z):
    """Unit vectors splitting the atom Z into one-dimensional sharps without crossing the blocks of E"""
    columns = []
    for block in atomic_blocks(E):
        sub = Z[block, block]
        if np.real(np.trace(sub)) <= 0.5:
            continue
        for v in range_isometry(sub, E.tol.eq).T:
            column = np.zeros(E.dim, dtype=complex)
            column[block] = v
            columns.append(linalg.phase_normalize(column, E.tol.cluster))
    return columns


def joint_context(E: Algebra, a: Effect, b: Effect) -> Context:
    """A context over which both a and b are combinations of its members"""
    check_same(E, a, b)
    atoms = simultaneous_atoms(E, [a, b])
    columns = [v for z in atoms for v in _refine(E, E.to_matrix(z))]
    columns.sort(key=lambda v: int(np.flatnonzero(np.abs(v) > E.tol.cluster)[0]))
    return context_from_vectors(E, np.stack(columns, axis=1))


@dataclass(frozen=True, eq=False)
class CommutantWitness:
    """b = Σ coefficients_i c_i over a context whose first member is the given one-dimensional effect"""
    context: Context
    coefficients: np.ndarray
    residual: float


@dataclass(frozen=True)
class Refusal:
    """b does not commute with the one-dimensional effect; `residual` is the commutator norm"""
    residual: float


def atom_commutant_witness(E: Algebra, a: Effect, b: Effect):
    check_same(E, a, b)
    if not is_one_dimensional(E, a):
        raise errors.NotOneDimensional("a is not a one-dimensional sharp effect")
    residual = E.commutator_norm(a, b)
    if residual > E.tol.eq:
        log.debug(f"no commutant witness, commutator norm {residual:.3e}")
        return Refusal(residual)
    ctx = joint_context(E, a, b)
    # Put the context member equal to a first
    phi = support_vector(E, a)
    first = int(np.argmax(np.abs(ctx.vectors.conj().T @ phi)))
    order = [first] + [i for i in range(len(ctx)) if i != first]
    ctx = context_from_vectors(E, ctx.vectors[:, order])
    return CommutantWitness(ctx, context_coefficients(E, ctx, b), context_residual(E, ctx, b))
