""" The representation map J(b) = U_BA b̃ U_BA* onto an anchor context space, transported products and the Hilbertian
self-test """
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same, oplus, orthogonal, seq
from src.backends import linalg
from src.backends.contexts import context_coefficients, context_from_unitary, context_residual
from src.representation.comparability import ComparabilityData, canonical_unitaries, extend
from src.spectral.forms import context_representation
from src.utils.run import get_logger

log = get_logger(__name__)


def tilde(E: Algebra, b: Effect, B) -> np.ndarray:
    """b̃ = Σ λ_i P(b̂_i) on H(B) for b = ⊕ λ_i b_i"""
    check_same(E, b)
    residual = context_residual(E, B, b)
    if residual > E.tol.eq:
        raise errors.NotRepresentable(f"b leaves the span of the context by {residual:.3e}", residual=residual)
    return np.diag(context_coefficients(E, B, b)).astype(complex)


def representing_contexts(E: Algebra, data: ComparabilityData, b: Effect):
    """Indices of the contexts of the family in which b is representable"""
    found, best = [], np.inf
    for k, ctx in enumerate(data.contexts):
        residual = context_residual(E, ctx, b)
        best = min(best, residual)
        if residual <= E.tol.eq:
            found.append(k)
    if not found:
        raise errors.NotRepresentable(f"b is not representable in the family (best residual {best:.3e})",
                                      residual=best)
    return found


def _require_valid(E: Algebra, data: ComparabilityData):
    if data.max_residual > E.tol.eq:
        worst = max(data.residuals, key=data.residuals.get)
        raise errors.ComparabilityViolated(
            f"comparability data fails {worst} by {data.residuals[worst]:.3e}", residual=data.residuals[worst]
        )


def transport(data: ComparabilityData, source, target, X) -> np.ndarray:
    """Ũ_ST(X) = U_ST X U_ST*"""
    U = data.unitary(source, target)
    return U @ X @ U.conj().T


def represent_J(E: Algebra, data: ComparabilityData, anchor, b: Effect) -> np.ndarray:
    """J(b) on H(anchor), checked to be the same whichever representing context of the family is used"""
    check_same(E, b)
    _require_valid(E, data)
    target = data.index(anchor)
    images = [transport(data, k, target, tilde(E, b, data.contexts[k])) for k in representing_contexts(E, data, b)]
    spread = max(float(np.linalg.norm(X - images[0])) for X in images)
    if spread > E.tol.eq:
        raise errors.ComparabilityViolated(f"J(b) depends on the representing context by {spread:.3e}",
                                           residual=spread)
    return images[0]


@dataclass
class TransportedProduct:
    """J(a∘b) next to the standard sequential product J(a)^{1/2} J(b) J(a)^{1/2}"""
    product: np.ndarray
    standard: np.ndarray
    residual: float


def transported_product(E: Algebra, data: ComparabilityData, anchor, a: Effect, b: Effect) -> TransportedProduct:
    product = represent_J(E, data, anchor, seq(E, a, b))
    root = linalg.psd_sqrt(represent_J(E, data, anchor, a))
    standard = linalg.hermitize(root @ represent_J(E, data, anchor, b) @ root)
    return TransportedProduct(product, standard, float(np.linalg.norm(product - standard)))


def strong_comparability_residual(E: Algebra, data: ComparabilityData, b1: Effect, b2: Effect) -> float:
    """‖(b₁⊕b₂)~ − (Ũ_AC b̃₁ + Ũ_BC b̃₂)‖ with b₁, b₂ and b₁⊕b₂ representable in A, B and C"""
    total = oplus(E, b1, b2)
    _require_valid(E, data)
    A = representing_contexts(E, data, b1)[0]
    B = representing_contexts(E, data, b2)[0]
    C = representing_contexts(E, data, total)[0]
    transported = (transport(data, A, C, tilde(E, b1, data.contexts[A]))
                   + transport(data, B, C, tilde(E, b2, data.contexts[B])))
    return float(np.linalg.norm(tilde(E, total, data.contexts[C]) - transported))


@dataclass
class SelfTestReport:
    """Residuals of the representation of a Hilbertian algebra on the space of an anchor context"""
    residuals: Dict[str, float]
    comparability: Dict[str, float]
    conjugator: np.ndarray = field(repr=False, default=None)
    panel: int = 0

    @property
    def max_residual(self):
        return max(list(self.residuals.values()) + list(self.comparability.values()), default=0.0)


def representation_self_test(E: Algebra, contexts=None, panel=None, anchor=0, seed=0, n_contexts=4,
                             panel_size=50) -> SelfTestReport:
    """Canonical unitaries over a context family, then J on a panel of effects: unit and zero preservation, scalars,
    additivity and strong comparability on orthogonal pairs (b_i/2, b_{i+1}/2), the transported product, isometry
    on differences, reflection of orthogonality, and agreement with conjugation by the anchor basis"""
    rng = np.random.default_rng(seed)
    if contexts is None:
        contexts = [context_from_unitary(E, linalg.haar_unitary(rng, E.dim)) for _ in range(n_contexts)]
    base = canonical_unitaries(E, contexts)
    panel = [E.sample_effect(rng) for _ in range(panel_size)] if panel is None else list(panel)
    check_same(E, *panel)
    W = base.contexts[base.index(anchor)].vectors
    residuals = dict(
        unit=float(np.linalg.norm(represent_J(E, base, anchor, E.unit()) - np.eye(E.dim))),
        zero=float(np.linalg.norm(represent_J(E, base, anchor, E.zero()))),
        conjugation=0.0, scalar=0.0, additivity=0.0, strong_comparability=0.0, product=0.0, isometry=0.0,
        orthogonality_reflection=0.0,
    )

    def eigencontext(x):
        return context_representation(E, x)[0]

    images = []
    for b in panel:
        data = extend(E, base, [eigencontext(b)])
        J = represent_J(E, data, anchor, b)
        images.append(J)
        residuals["conjugation"] = max(
            residuals["conjugation"], float(np.linalg.norm(J - W.conj().T @ E.to_matrix(b) @ W))
        )
        lam = float(rng.uniform(0.1, 1.0))
        residuals["scalar"] = max(
            residuals["scalar"], float(np.linalg.norm(represent_J(E, data, anchor, E._scale(lam, b)) - lam * J))
        )

    for i in range(len(panel) - 1):
        b, c = panel[i], panel[i + 1]
        x, y = E._scale(0.5, b), E._scale(0.5, c)
        total, product = oplus(E, x, y), seq(E, b, c)
        data = extend(E, base, [eigencontext(b), eigencontext(c), eigencontext(total), eigencontext(product)])
        residuals["additivity"] = max(residuals["additivity"], float(np.linalg.norm(
            represent_J(E, data, anchor, total) - represent_J(E, data, anchor, x) - represent_J(E, data, anchor, y)
        )))
        residuals["strong_comparability"] = max(
            residuals["strong_comparability"], strong_comparability_residual(E, data, x, y)
        )
        residuals["product"] = max(residuals["product"], transported_product(E, data, anchor, b, c).residual)
        residuals["isometry"] = max(residuals["isometry"], abs(
            float(np.linalg.norm(images[i] - images[i + 1])) - float(np.linalg.norm(E.to_matrix(b) - E.to_matrix(c)))
        ))
        # b ⊥ c exactly when J(b) + J(c) stays below the identity
        reflected = float(np.max(np.linalg.eigvalsh(images[i] + images[i + 1]))) <= 1.0 + E.tol.psd
        residuals["orthogonality_reflection"] = max(
            residuals["orthogonality_reflection"], 0.0 if reflected == orthogonal(E, b, c) else 1.0
        )
    log.debug(f"representation self-test over {len(panel)} effects: {residuals}")
    return SelfTestReport(residuals, dict(base.residuals), W, len(panel))
