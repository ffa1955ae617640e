""" Sharp and one-dimensional effects, contexts (finest sharp measurements), hat states and transition
probabilities """
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from opt_einsum import contract

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same
from src.backends import linalg
from src.backends.states import State, pair


def is_sharp(E: Algebra, a: Effect) -> bool:
    """a∘a = a, decided on the spectrum: every eigenvalue within the cluster gap of 0 or 1"""
    check_same(E, a)
    w, _ = E.eigensystem(a)
    return bool(np.all(np.minimum(np.abs(w), np.abs(1.0 - w)) <= E.tol.cluster))


def is_one_dimensional(E: Algebra, a: Effect) -> bool:
    return is_sharp(E, a) and E.rank(a) == 1


def require_one_dimensional(E, a, what="a"):
    if not is_one_dimensional(E, a):
        raise errors.NotOneDimensional(f"{what} is not a one-dimensional sharp effect")


def support_vector(E: Algebra, a: Effect) -> np.ndarray:
    """Representative unit vector φ (embedding coordinates) with a = P(φ)"""
    require_one_dimensional(E, a)
    w, V = E.eigensystem(a)
    return V[:, int(np.argmax(w))]


@dataclass(frozen=True, eq=False)
class Context:
    """Ordered one-dimensional sharp effects summing to the unit, together with their representative vectors
    (columns of `vectors`, phase fixed at construction) in the block-diagonal embedding"""
    members: Tuple[Effect, ...]
    vectors: np.ndarray
    unitary: Optional[np.ndarray] = None

    def __post_init__(self):
        self.vectors.setflags(write=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


def context_residuals(E: Algebra, members, vectors) -> dict:
    """Context invariants: ⊕ a_i = 1 and â_i(a_j) = δ_ij"""
    total = sum((E.to_matrix(a) for a in members), np.zeros((E.dim, E.dim), dtype=complex))
    overlaps = np.abs(vectors.conj().T @ vectors) ** 2
    return {
        "unit": float(np.linalg.norm(total - np.eye(E.dim))),
        "orthogonality": float(np.max(np.abs(overlaps - np.eye(len(members))), initial=0.0)),
    }


def make_context(E: Algebra, members, vectors=None) -> Context:
    members = tuple(members)
    check_same(E, *members)
    for i, a in enumerate(members):
        if not is_one_dimensional(E, a):
            raise errors.InvalidContext(f"member {i} is not one-dimensional sharp")
    if len(members) != E.context_size:
        raise errors.InvalidContext(f"a context of this algebra has {E.context_size} members, got {len(members)}")
    if vectors is None:
        vectors = np.stack([support_vector(E, a) for a in members], axis=1)
    vectors = np.stack(
        [linalg.phase_normalize(v / np.linalg.norm(v), E.tol.cluster) for v in np.asarray(vectors, dtype=complex).T],
        axis=1,
    )
    residuals = context_residuals(E, members, vectors)
    if max(residuals.values()) > E.tol.eq:
        raise errors.InvalidContext(f"context invariants violated: {residuals}", residual=max(residuals.values()))
    return Context(members, vectors)


def context_from_vectors(E: Algebra, vectors) -> Context:
    vectors = np.asarray(vectors, dtype=complex)
    members = [E.from_matrix(linalg.projector(v / np.linalg.norm(v)), validate=False) for v in vectors.T]
    return make_context(E, [E._clamp(a) for a in members], vectors)


def context_from_unitary(E: Algebra, U) -> Context:
    """(P(u_1), …, P(u_d)) for the columns of U"""
    U = np.asarray(U, dtype=complex)
    if U.shape != (E.dim, E.dim):
        raise errors.NotUnitary(f"expected a {E.dim}x{E.dim} unitary, got shape {U.shape}")
    defect = float(np.linalg.norm(U.conj().T @ U - np.eye(E.dim)))
    if defect > E.tol.eq:
        raise errors.NotUnitary(f"‖U*U − I‖ = {defect:.3e}", residual=defect)
    if E.name != "hilbertian":
        # Only basis permutations (up to phases) respect the classical or block structure
        support = np.abs(U) > E.tol.cluster
        if not np.all(support.sum(axis=0) == 1):
            raise errors.InvalidContext("columns must be standard basis vectors up to phase for this backend")
        return context_from_vectors(E, U)
    ctx = context_from_vectors(E, U)
    return Context(ctx.members, ctx.vectors, U)


def standard_context(E: Algebra) -> Context:
    """Standard basis; for a classical algebra this is its unique context (δ_1, …, δ_n)"""
    return context_from_vectors(E, np.eye(E.dim, dtype=complex))


def ds_contexts(E: Algebra, part_contexts) -> Context:
    """The context {(a_i, 0), (0, b_j)} of a direct sum built from one context per summand"""
    if E.name != "direct_sum":
        raise errors.InvalidContext(f"ds_contexts needs a direct sum, got {E.signature}")
    part_contexts = list(part_contexts)
    if len(part_contexts) != len(E.parts):
        raise errors.InvalidContext(f"expected {len(E.parts)} part contexts, got {len(part_contexts)}")
    members, columns = [], []
    for i, (P, ctx, block) in enumerate(zip(E.parts, part_contexts, E.blocks)):
        if not isinstance(ctx, Context) or any(a.signature != P.signature for a in ctx.members):
            raise errors.InvalidContext(f"part context {i} does not belong to summand {P.signature}")
        for a, v in zip(ctx.members, ctx.vectors.T):
            members.append(E.effect(tuple(a if j == i else Q.zero() for j, Q in enumerate(E.parts))))
            column = np.zeros(E.dim, dtype=complex)
            column[block] = v
            columns.append(column)
    return make_context(E, members, np.stack(columns, axis=1))


def context_coefficients(E: Algebra, A: Context, b: Effect) -> np.ndarray:
    """(â_1(b), …, â_n(b)) read from the representative vectors"""
    check_same(E, b)
    V = A.vectors
    return np.real(contract("ik,ij,jk->k", V.conj(), E.to_matrix(b), V))


def context_residual(E: Algebra, A: Context, b: Effect) -> float:
    """Distance from b to its projection Σ â_i(b) a_i onto the span of the context"""
    return E.distance(b, E.combine(A.vectors, context_coefficients(E, A, b)))


def hat_state(E: Algebra, a: Effect) -> State:
    """The unique state with â(a) = 1"""
    return E.vector_state(support_vector(E, a))


def transition_probability(E: Algebra, a: Effect, b: Effect) -> float:
    """â(b) for one-dimensional a, b; Hilbertian |⟨φ, ψ⟩|²"""
    require_one_dimensional(E, b, "b")
    return float(np.clip(pair(E, hat_state(E, a), b), 0.0, 1.0))
