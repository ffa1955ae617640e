""" State evaluation, conditioning ω(· | b) = ω(b ∘ ·) / ω(b), and the conditional probability maps γ_a on states
extended by the zero functional """
from dataclasses import dataclass, field
from typing import Dict, Optional

from src.effects import errors
from src.effects.core import Algebra, Effect, check_same, commutes, oplus, orthogonal, complement, seq
from src.backends.states import State, check_state, pair, state_distance, zero_state
from src.utils.run import get_logger

log = get_logger(__name__)


def evaluate(E: Algebra, state: State, b: Effect) -> float:
    check_state(E, state)
    check_same(E, b)
    return pair(E, state, b)


def condition(E: Algebra, state: State, b: Effect) -> State:
    value = evaluate(E, state, b)
    if value <= E.tol.eq:
        raise errors.ZeroProbability(f"ω(b) = {value:.3e} leaves the conditional state undefined", residual=value)
    conditioned, _ = E.lueders(state, b)
    return conditioned


def gamma_apply(E: Algebra, a: Effect, state: State) -> State:
    """γ_a(0) = 0; γ_a(ω) = 0 when ω(a) vanishes, else ω(· | a)"""
    check_state(E, state)
    check_same(E, a)
    if state.is_zero or pair(E, state, a) <= E.tol.eq:
        return zero_state(E)
    return condition(E, state, a)


def weighted_conditional(E: Algebra, state: State, a: Effect, c: Effect) -> float:
    """ω(a) γ_a(ω)(c)"""
    return pair(E, state, a) * pair(E, gamma_apply(E, a, state), c)


@dataclass
class ConditionReport:
    """Residuals of the γ identities; an identity whose hypotheses fail is listed in `skipped` with the reason.

    `zero_branches` names the denominators ω(x) that vanished (x in a, b, a⊕b, a′, a∘b).
    """
    residuals: Dict[str, float] = field(default_factory=dict)
    skipped: Dict[str, str] = field(default_factory=dict)
    zero_branches: Dict[str, bool] = field(default_factory=dict)
    inputs: Dict = field(default_factory=dict, repr=False)

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)


def verify_gamma_identities(E: Algebra, a: Effect, b: Effect, c: Effect, state: State) -> ConditionReport:
    """Evaluate the sum rule (a ⊥ b with c commuting with both), the complement rule (a, b commuting), the two
    product rules, and the composition γ_b γ_a = γ_a γ_b = γ_{a∘b} for commuting a, b"""
    check_same(E, a, b, c)
    check_state(E, state)
    report = ConditionReport(inputs=dict(a=a, b=b, c=c, state=state))
    ab = seq(E, a, b)
    branches = dict(a=a, b=b, a_complement=complement(E, a), a_seq_b=ab)

    try:
        if not orthogonal(E, a, b):
            raise errors.PreconditionUnsatisfied("sum rule needs a ⊥ b")
        if not (commutes(E, c, a) and commutes(E, c, b)):
            raise errors.PreconditionUnsatisfied("sum rule needs c to commute with a and b")
        total = oplus(E, a, b)
        branches["a_oplus_b"] = total
        report.residuals["sum_rule"] = abs(
            weighted_conditional(E, state, total, c)
            - weighted_conditional(E, state, a, c)
            - weighted_conditional(E, state, b, c)
        )
    except errors.PreconditionUnsatisfied as e:
        report.skipped["sum_rule"] = str(e)

    if commutes(E, a, b):
        report.residuals["complement_rule"] = abs(
            weighted_conditional(E, state, complement(E, a), b)
            - (pair(E, state, b) - weighted_conditional(E, state, a, b))
        )
        composed = gamma_apply(E, b, gamma_apply(E, a, state))
        swapped = gamma_apply(E, a, gamma_apply(E, b, state))
        direct = gamma_apply(E, ab, state)
        report.residuals["composition_rule"] = state_distance(E, composed, direct)
        report.residuals["gamma_commute"] = state_distance(E, composed, swapped)
    else:
        reason = "needs a and b to commute"
        report.skipped.update(complement_rule=reason, composition_rule=reason, gamma_commute=reason)

    report.residuals["product_rule"] = abs(
        weighted_conditional(E, state, ab, c) - pair(E, state, seq(E, ab, c))
    )
    # ω(a∘b) [γ_b γ_a ω](c) = ω(a∘(b∘c))
    report.residuals["iterated_product_rule"] = abs(
        pair(E, state, ab) * pair(E, gamma_apply(E, b, gamma_apply(E, a, state)), c)
        - pair(E, state, seq(E, a, seq(E, b, c)))
    )
    report.zero_branches = {name: pair(E, state, x) <= E.tol.eq for name, x in branches.items()}
    if report.max_residual > E.tol.eq:
        log.debug(f"γ identity residuals {report.residuals}")
    return report


@dataclass
class FixedPoint:
    state: State
    converged: bool
    iterations: int


def gamma_fixed_point(E: Algebra, a: Effect, start: State, steps=50, tol: Optional[float] = None) -> FixedPoint:
    """Iterate ω ↦ γ_a(ω) until consecutive states agree"""
    tol = E.tol.eq if tol is None else tol
    state = start
    for i in range(1, steps + 1):
        nxt = gamma_apply(E, a, state)
        if state_distance(E, nxt, state) <= tol:
            return FixedPoint(nxt, True, i)
        state = nxt
    return FixedPoint(state, False, steps)
