""" Context state spaces H(A), the diagonal readout operators L_b, and families of comparability unitaries U_AB
between context spaces """
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from src.effects import errors
from src.effects.core import Algebra, Effect
from src.backends.contexts import Context, context_coefficients, context_residuals, hat_state
from src.backends.states import pair
from src.utils.run import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ContextSpace:
    """H(A) = span of the hat states â_1, …, â_n, with coefficient vectors as coordinates"""
    algebra: Algebra
    context: Context

    @property
    def dim(self):
        return len(self.context)

    def hat_states(self):
        return [hat_state(self.algebra, a) for a in self.context.members]

    def basis(self):
        return np.eye(self.dim, dtype=complex)

    @staticmethod
    def inner(x, y):
        """⟨x, y⟩ = Σ conj(x_i) y_i"""
        return complex(np.vdot(x, y))


def context_space(E: Algebra, A: Context) -> ContextSpace:
    if not isinstance(A, Context) or any(a.signature != E.signature for a in A.members):
        raise errors.InvalidContext(f"not a context of {E.signature}")
    if len(A) != E.context_size:
        raise errors.InvalidContext(f"a context of this algebra has {E.context_size} members, got {len(A)}")
    residual = max(context_residuals(E, A.members, A.vectors).values())
    if residual > E.tol.eq:
        raise errors.InvalidContext(f"context invariants violated by {residual:.3e}", residual=residual)
    return ContextSpace(E, A)


def L_operator(E: Algebra, b: Effect, A: Context) -> np.ndarray:
    """L_b = Σ â_j(b) P(â_j), diagonal in the hat-state basis"""
    context_space(E, A)
    return np.diag(context_coefficients(E, A, b)).astype(complex)


@dataclass(frozen=True, eq=False)
class ComparabilityData:
    """Unitaries U_AB : H(A) → H(B) for every ordered pair of a finite context family, keyed by index pairs, with the
    residuals of their last validation"""
    contexts: Tuple[Context, ...]
    unitaries: Dict[Tuple[int, int], np.ndarray]
    residuals: Dict[str, float] = field(default_factory=dict)
    names: Optional[Tuple[str, ...]] = None

    def __len__(self):
        return len(self.contexts)

    def index(self, anchor) -> int:
        if isinstance(anchor, (int, np.integer)):
            if not 0 <= anchor < len(self.contexts):
                raise errors.InvalidContext(f"context index {anchor} out of range")
            return int(anchor)
        if isinstance(anchor, str):
            if self.names is None or anchor not in self.names:
                raise errors.UnknownName(f"unknown context '{anchor}'", name=anchor)
            return self.names.index(anchor)
        for i, ctx in enumerate(self.contexts):
            if ctx is anchor:
                return i
        raise errors.InvalidContext("context is not part of the family")

    def unitary(self, source, target) -> np.ndarray:
        key = (self.index(source), self.index(target))
        if key not in self.unitaries:
            raise errors.IncompleteData(f"no unitary for the context pair {key}")
        return self.unitaries[key]

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)


def validate_comparability(data: ComparabilityData, E: Algebra) -> Dict[str, float]:
    """Maximal residuals of U_AA = I, U_BA = U_AB*, |⟨U_AB â_i, b̂_j⟩|² = â_i(b_j), the cocycle U_BC U_AB = U_AC and
    |⟨U_AB â_i, U_CB ĉ_k⟩|² = â_i(c_k) over the whole family"""
    n = len(data.contexts)
    missing = [(i, j) for i in range(n) for j in range(n) if (i, j) not in data.unitaries]
    if missing:
        raise errors.IncompleteData(f"missing unitaries for context pairs {missing[:5]}")
    for ctx in data.contexts:
        context_space(E, ctx)
    U = data.unitaries
    hats = [[hat_state(E, a) for a in ctx.members] for ctx in data.contexts]
    # transitions[i][j][p, q] = â_p(b_q) for a_p in context i, b_q in context j
    transitions = [
        [np.array([[pair(E, h, b) for b in data.contexts[j].members] for h in hats[i]]) for j in range(n)]
        for i in range(n)
    ]
    residuals = dict(identity=0.0, adjoint=0.0, transition=0.0, cocycle=0.0, cross_overlap=0.0)
    for i in range(n):
        residuals["identity"] = max(residuals["identity"], float(np.linalg.norm(U[i, i] - np.eye(len(U[i, i])))))
        for j in range(n):
            residuals["adjoint"] = max(residuals["adjoint"], float(np.linalg.norm(U[j, i] - U[i, j].conj().T)))
            # |(U_ij)_{qp}|² against â_p(b_q)
            overlap = np.abs(U[i, j].T) ** 2
            residuals["transition"] = max(residuals["transition"], float(np.max(np.abs(overlap - transitions[i][j]))))
            for k in range(n):
                residuals["cocycle"] = max(residuals["cocycle"], float(np.linalg.norm(U[j, k] @ U[i, j] - U[i, k])))
                cross = np.abs(U[i, j].conj().T @ U[k, j]) ** 2
                residuals["cross_overlap"] = max(
                    residuals["cross_overlap"], float(np.max(np.abs(cross - transitions[i][k])))
                )
    return residuals


def canonical_unitaries(E: Algebra, contexts, names=None) -> ComparabilityData:
    """U_AB â_i = Σ_j ⟨b̂_j, â_i⟩ b̂_j from the stored representative vectors, i.e. U_AB = V_B* V_A"""
    if E.name != "hilbertian":
        raise errors.InvalidContext(
            f"comparability unitaries are synthesized for Hilbertian algebras only, got {E.signature}"
        )
    contexts = tuple(contexts)
    for ctx in contexts:
        context_space(E, ctx)
    unitaries = {
        (i, j): B.vectors.conj().T @ A.vectors for i, A in enumerate(contexts) for j, B in enumerate(contexts)
    }
    data = ComparabilityData(contexts, unitaries, names=tuple(names) if names is not None else None)
    residuals = validate_comparability(data, E)
    log.debug(f"canonical unitaries over {len(contexts)} contexts: {residuals}")
    return replace(data, residuals=residuals)


def extend(E: Algebra, data: ComparabilityData, contexts) -> ComparabilityData:
    """Canonical family over the contexts of `data` followed by `contexts`; indices of `data` are kept"""
    contexts = tuple(contexts)
    names = None if data.names is None else data.names + tuple(f"_{i}" for i in range(len(contexts)))
    return canonical_unitaries(E, data.contexts + contexts, names)
