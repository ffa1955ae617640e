""" Unique-certainty effects, dispersion-free analysis, hat-state laws and order determination by states """
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.effects.core import Algebra, Effect, check_same, le, seq
from src.backends.contexts import context_coefficients, hat_state, require_one_dimensional, standard_context
from src.backends.states import State, check_state, pair
from src.conditioning.gamma import condition
from src.spectral.forms import context_representation, spectral_form
from src.utils.run import get_logger

log = get_logger(__name__)

UNIQUE, NONE, MANY = "unique", "none", "many"


@dataclass
class CertaintyVerdict:
    """Which states give a probability 1: exactly one (`state`), none, or many"""
    verdict: str
    state: Optional[State] = None
    multiplicity: int = 0


def unique_certainty_state(E: Algebra, a: Effect) -> CertaintyVerdict:
    """Reads the eigeneffect of the top cluster of the spectral form; a top eigenvalue within the cluster gap of 1
    counts as 1"""
    form = spectral_form(E, a)
    if form.maximum < 1.0 - E.tol.cluster:
        return CertaintyVerdict(NONE)
    multiplicity = form.multiplicities[0]
    if multiplicity > 1:
        return CertaintyVerdict(MANY, multiplicity=multiplicity)
    return CertaintyVerdict(UNIQUE, hat_state(E, form.eigeneffects[0]), 1)


@dataclass
class DispersionVerdict:
    """ω(b∘b) against ω(b)²; when dispersion-free, b = λ a ⊕ c with a sharp, a∘c = 0 and ω(a) = 1"""
    dispersion_free: bool
    value: float
    dispersion: float
    decomposition: Optional[Dict] = None
    residuals: Dict[str, float] = field(default_factory=dict)


def _level_set(masses, distances, tol):
    """Members nearest to ω(b) until the ω-mass left outside is within `tol`"""
    level = np.zeros(len(masses), dtype=bool)
    outside = float(np.sum(masses))
    for i in np.argsort(distances, kind="stable"):
        if outside <= tol:
            break
        level[i] = True
        outside -= masses[i]
    return level


def dispersion_analysis(E: Algebra, state: State, b: Effect) -> DispersionVerdict:
    """The level set is grown from the members nearest to ω(b), so ω(a) ≥ 1 − eq by construction; `level` measures
    how far its coefficients stray beyond the cluster gap"""
    check_state(E, state)
    check_same(E, b)
    value = pair(E, state, b)
    dispersion = pair(E, state, seq(E, b, b)) - value ** 2
    if abs(dispersion) > E.tol.eq:
        return DispersionVerdict(False, value, dispersion)
    ctx, _ = context_representation(E, b)
    # Unclustered readouts, so that the remainder carries b's own coefficients
    coefficients = context_coefficients(E, ctx, b)
    distances = np.abs(coefficients - value)
    level = _level_set(context_masses(E, state, ctx), distances, E.tol.eq)
    a = E._clamp(E.combine(ctx.vectors, level.astype(float)))
    c = E.combine(ctx.vectors, np.where(level, 0.0, coefficients))
    residuals = {
        "certainty": max(0.0, 1.0 - pair(E, state, a)),
        "orthogonality": E.distance(seq(E, a, c), E.zero()),
        "level": max(0.0, float(np.max(distances[level], initial=0.0)) - E.tol.cluster),
    }
    if residuals["level"] > 0.0:
        log.debug(f"dispersion-free at {value:.6g} but the level set spreads {residuals['level']:.3e} beyond the gap")
    return DispersionVerdict(True, value, dispersion, dict(scalar=value, sharp=a, remainder=c), residuals)


@dataclass
class HatStateReport:
    residuals: Dict[str, float]
    conditioned_states: int


def verify_hat_state_laws(E: Algebra, a: Effect, panel, states=()) -> HatStateReport:
    """a∘b = â(b) a, â(b) = â(a∘b), and ω(· | a) = â for every state with ω(a) > 0"""
    check_same(E, a, *panel)
    require_one_dimensional(E, a)
    hat = hat_state(E, a)
    residuals = dict(seq_scaling=0.0, seq_invariance=0.0, universal_conditioning=0.0)
    conditioned = 0
    for b in panel:
        value = pair(E, hat, b)
        residuals["seq_scaling"] = max(residuals["seq_scaling"], E.distance(seq(E, a, b), E._scale(value, a)))
        residuals["seq_invariance"] = max(residuals["seq_invariance"], abs(value - pair(E, hat, seq(E, a, b))))
        for state in states:
            if pair(E, state, a) <= E.tol.eq:
                continue
            residual = abs(pair(E, condition(E, state, a), b) - value)
            residuals["universal_conditioning"] = max(residuals["universal_conditioning"], residual)
            conditioned += 1
    return HatStateReport(residuals, conditioned)


def state_panel(E: Algebra, contexts) -> List[State]:
    """Hat states of every member of the given contexts"""
    return [E.vector_state(v) for ctx in contexts for v in ctx.vectors.T]


@dataclass
class OrderReport:
    dominated: bool
    ordered: bool
    margin: float

    @property
    def agree(self):
        return self.dominated == self.ordered


def order_determined(E: Algebra, a: Effect, b: Effect, panel=None) -> OrderReport:
    """Compare ω(a) ≤ ω(b) on a panel of states with a ≤ b. The default panel holds the hat states of the standard
    context and of the eigencontext of b − a, which is enough to decide the order."""
    check_same(E, a, b)
    if panel is None:
        difference = E.from_matrix(E.to_matrix(b) - E.to_matrix(a), validate=False)
        _, V = E.eigensystem(difference)
        panel = state_panel(E, [standard_context(E)]) + [E.vector_state(v) for v in V.T]
    margin = min(pair(E, state, b) - pair(E, state, a) for state in panel)
    return OrderReport(margin >= -E.tol.eq, le(E, a, b), float(margin))


def context_masses(E: Algebra, state: State, ctx) -> np.ndarray:
    """ω(a_i) for the members of a context"""
    check_state(E, state)
    return np.array([pair(E, state, x) for x in ctx.members])
