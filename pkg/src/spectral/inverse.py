""" Ceilings, pseudo-inverses and the audit of inverse preservation (a∘b)⁻¹ = a⁻¹∘b⁻¹ """
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same, seq
from src.effects.sampling import sample_rng
from src.utils.run import get_logger

log = get_logger(__name__)


def _support(E: Algebra, a: Effect):
    w, V = E.eigensystem(a)
    mask = w > E.tol.cluster
    return w[mask], V[:, mask]


def ceiling(E: Algebra, a: Effect) -> Effect:
    """⌈a⌉: the projection onto the eigenvectors with nonzero eigenvalue"""
    check_same(E, a)
    _, V = _support(E, a)
    return E._clamp(E.combine(V, np.ones(V.shape[1])))


def pseudo_inverse(E: Algebra, a: Effect) -> Tuple[Effect, float]:
    """a⁻¹ = λ(a) Σ c_i / λ_i over the nonzero eigenvalues λ_i of a, together with λ(a)"""
    check_same(E, a)
    w, V = _support(E, a)
    if len(w) == 0:
        raise errors.ZeroEffect("the zero effect has no pseudo-inverse")
    lam = float(w.min())
    return E._clamp(E.combine(V, lam / w)), lam


def is_invertible(E: Algebra, a: Effect) -> bool:
    check_same(E, a)
    return E.min_eig(a) > E.tol.cluster


def inverse(E: Algebra, a: Effect) -> Effect:
    if not is_invertible(E, a):
        raise errors.NotInvertible(f"a has eigenvalue {E.min_eig(a):.3e} at zero", residual=E.min_eig(a))
    return pseudo_inverse(E, a)[0]


def involution_residuals(E: Algebra, a: Effect) -> Dict[str, float]:
    """(a⁻¹)⁻¹ = a / ‖a‖ and ((a⁻¹)⁻¹)⁻¹ = a⁻¹"""
    first = inverse(E, a)
    second = inverse(E, first)
    return {
        "double": E.distance(second, E._scale(1.0 / E.max_eig(a), a)),
        "triple": E.distance(inverse(E, second), first),
    }


@dataclass
class InverseAudit:
    """Both sides of (a∘b)⁻¹ = a⁻¹∘b⁻¹; they agree up to `scalar` = λ(a)λ(b)/λ(a∘b)"""
    exact: bool
    proportional: bool
    scalar: float
    exact_residual: float
    proportional_residual: float
    lambdas: Tuple[float, float, float]
    lhs: Effect = field(repr=False, default=None)
    rhs: Effect = field(repr=False, default=None)


def audit_inverse_preserving(E: Algebra, a: Effect, b: Effect) -> InverseAudit:
    check_same(E, a, b)
    for name, x in (("a", a), ("b", b)):
        if not is_invertible(E, x):
            raise errors.NotInvertible(f"{name} is not invertible", residual=E.min_eig(x), name=name)
    product = seq(E, a, b)
    lhs, lam_ab = pseudo_inverse(E, product)
    a_inv, lam_a = pseudo_inverse(E, a)
    b_inv, lam_b = pseudo_inverse(E, b)
    rhs = seq(E, a_inv, b_inv)
    exact_residual = E.distance(lhs, rhs)
    proportional_residual = E.distance(
        E._scale(1.0 / E.max_eig(lhs), lhs), E._scale(1.0 / E.max_eig(rhs), rhs)
    )
    audit = InverseAudit(
        exact=exact_residual <= E.tol.eq,
        proportional=proportional_residual <= E.tol.eq,
        scalar=lam_a * lam_b / lam_ab,
        exact_residual=exact_residual,
        proportional_residual=proportional_residual,
        lambdas=(lam_a, lam_b, lam_ab),
        lhs=lhs,
        rhs=rhs,
    )
    if not audit.exact:
        log.debug(f"(a∘b)⁻¹ and a⁻¹∘b⁻¹ differ by {exact_residual:.3e}; scalar {audit.scalar:.6f}, "
                  f"λ(a)={lam_a:.6g} λ(b)={lam_b:.6g} λ(a∘b)={lam_ab:.6g}")
    return audit


def sample_invertible(E: Algebra, rng, floor=0.05):
    """A random effect pushed away from zero: (1 - t) x + t 1 with t drawn from [floor, 1/2]"""
    t = float(rng.uniform(floor, 0.5))
    return E._add(E._scale(1.0 - t, E.sample_effect(rng)), E._scale(t, E.unit()))


@dataclass
class InverseSweep:
    samples: int
    exact: int = 0
    proportional: int = 0
    min_scalar: float = np.inf
    max_scalar: float = -np.inf
    max_proportional_residual: float = 0.0
    # max of λ(a)λ(b) − λ(a∘b); never positive beyond rounding
    max_lambda_excess: float = -np.inf
    witnesses: List[Dict] = field(default_factory=list)


def inverse_preservation_sweep(E: Algebra, n_samples=100, seed=0, max_witnesses=5) -> InverseSweep:
    sweep = InverseSweep(n_samples)
    for index in range(n_samples):
        rng = sample_rng(seed, "inverse_preservation", index)
        audit = audit_inverse_preserving(E, sample_invertible(E, rng), sample_invertible(E, rng))
        lam_a, lam_b, lam_ab = audit.lambdas
        sweep.exact += int(audit.exact)
        sweep.proportional += int(audit.proportional)
        sweep.min_scalar = min(sweep.min_scalar, audit.scalar)
        sweep.max_scalar = max(sweep.max_scalar, audit.scalar)
        sweep.max_proportional_residual = max(sweep.max_proportional_residual, audit.proportional_residual)
        sweep.max_lambda_excess = max(sweep.max_lambda_excess, lam_a * lam_b - lam_ab)
        if not audit.proportional and len(sweep.witnesses) < max_witnesses:
            sweep.witnesses.append(dict(index=index, seed=seed, residual=audit.proportional_residual))
    return sweep
