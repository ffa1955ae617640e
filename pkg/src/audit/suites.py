""" Named check suites run by `cosea check`.

A suite maps check names to trial factories `factory(E, sampler) -> trial(rng) -> (residual | None, inputs)`, which
are evaluated through the same sampling harness as the axioms. Suites are selected by name through
src.utils.registry.suite and constructed with src.utils.config.instantiate.
"""
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import scipy.linalg

from src.effects import errors
from src.effects.axioms import AXIOMS, DERIVED, CheckResult, agreement, order_violation, run_property, seq_commutator
from src.effects.core import Algebra, commutes, complement, distance, is_zero, le, oplus, seq
from src.effects.sampling import Sampler
from src.backends import linalg
from src.backends.contexts import (
    context_from_unitary, context_residual, context_residuals, hat_state, is_one_dimensional, is_sharp,
    support_vector, transition_probability,
)
from src.backends.states import ds_state, ds_state_decompose, pair, state_distance, zero_state
from src.backends.sums import ds_project
from src.structure import (
    algebra_span, center_basis, central_split, commutant_basis, factorize, in_commutant, is_factor, joint_context,
    minimal_central_sharps,
)
from src.spectral import (
    audit_inverse_preserving, ceiling, context_representation, involution_residuals, is_invertible, pseudo_inverse,
    sample_invertible, spectral_form, spectrum_stats,
)
from src.conditioning import (
    condition, dispersion_analysis, gamma_fixed_point, order_determined, unique_certainty_state,
    verify_gamma_identities, verify_hat_state_laws,
)
from src.conditioning.certainty import UNIQUE, context_masses
from src.representation import L_operator, canonical_unitaries, representation_self_test, tilde
from src.representation.transport import transport
from src.utils.run import get_logger

log = get_logger(__name__)


@dataclass
class Check:
    factory: Callable
    # None: the algebra's equality tolerance
    threshold: Optional[float] = None
    # Fraction of the requested samples, for checks that solve a linear system or build a context family per sample
    share: float = 1.0


class Suite:
    """A group of property checks evaluated on independent samples"""
    name = None

    def __init__(self, samples=None, checks=None, boundary=0.1):
        self.samples = samples
        self.only = None if checks is None else list(checks)
        self.boundary = boundary

    def checks(self, E: Algebra) -> Dict[str, Check]:
        raise NotImplementedError

    def plan(self, E: Algebra) -> Dict[str, Check]:
        plan = self.checks(E)
        if self.only is not None:
            unknown = set(self.only) - set(plan)
            if unknown:
                raise errors.UnknownName(f"unknown checks {sorted(unknown)} in suite '{self.name}'")
            plan = {name: plan[name] for name in self.only}
        return plan

    def run(self, E: Algebra, n_samples=100, seed=0, progress=False, workers=1) -> Dict[str, CheckResult]:
        n_samples = n_samples if self.samples is None else self.samples
        sampler = Sampler(E, boundary=self.boundary)
        results = {}
        for name, check in self.plan(E).items():
            n = max(1, int(round(n_samples * check.share)))
            threshold = E.tol.eq if check.threshold is None else check.threshold
            results[name] = run_property(name, check.factory(E, sampler), n, seed, threshold, group=self.name,
                                         progress=progress, workers=workers)
            log.debug(f"{self.name}/{name}: {results[name].passed}/{n} passed, "
                      f"max residual {results[name].max_residual:.3e}")
        return results


class AxiomSuite(Suite):
    name = "axioms"

    def checks(self, E):
        return {name: Check(factory) for name, factory in AXIOMS.items()}


""" Derived laws and backend-level theorems """


def context_cardinality(E, S):
    def trial(rng):
        b, c = S.effect(rng), S.effect(rng)
        sizes = [len(context_representation(E, x)[0]) for x in (b, c)]
        return float(max(abs(s - E.context_size) for s in sizes)), dict(b=b, c=c)
    return trial


def transition_symmetry(E, S):
    def trial(rng):
        a, b = S.one_dimensional(rng), S.one_dimensional(rng)
        return abs(transition_probability(E, a, b) - transition_probability(E, b, a)), dict(a=a, b=b)
    return trial


def state_uniqueness(E, S):
    def trial(rng):
        a, start = S.one_dimensional(rng), S.state(rng)
        state, mass = E.lueders(start, a)
        if state is None or mass <= E.tol.eq:
            return None, dict(a=a)
        if pair(E, state, a) < 1.0 - E.tol.eq:
            return None, dict(a=a)
        hat = hat_state(E, a)
        panel = [S.effect(rng) for _ in range(4)]
        return max(abs(pair(E, state, b) - pair(E, hat, b)) for b in panel), dict(a=a)
    return trial


def _direct_sum_only(trial):
    def wrapped(E, S):
        if E.name != "direct_sum":
            return lambda rng: (None, {})
        return trial(E, S)
    return wrapped


@_direct_sum_only
def componentwise_order(E, S):
    def trial(rng):
        a, b = S.dominated_pair(rng) if rng.uniform() < 0.5 else (S.effect(rng), S.effect(rng))
        parts = all(le(P, ds_project(E, a, i), ds_project(E, b, i)) for i, P in enumerate(E.parts))
        return agreement((le(E, a, b), parts)), dict(a=a, b=b)
    return trial


@_direct_sum_only
def componentwise_sharpness(E, S):
    def trial(rng):
        a = S.sharp(rng) if rng.uniform() < 0.5 else E.effect(tuple(
            P.sample_sharp(rng) if rng.uniform() < 0.5 else P.sample_effect(rng) for P in E.parts
        ))
        parts = all(is_sharp(P, ds_project(E, a, i)) for i, P in enumerate(E.parts))
        return agreement((is_sharp(E, a), parts)), dict(a=a)
    return trial


@_direct_sum_only
def state_hull(E, S):
    def trial(rng):
        weights = rng.dirichlet(np.ones(len(E.parts)))
        u = rng.uniform()
        if u < 0.2:
            weights = np.eye(len(E.parts))[rng.integers(len(E.parts))]
        elif u < 0.4:
            weights[rng.integers(len(E.parts))] = 0.0
            weights = weights / weights.sum()
        parts = [P.sample_state(rng) for P in E.parts]
        recovered_weights, recovered = ds_state_decompose(E, ds_state(E, weights, parts))
        residual = float(np.max(np.abs(recovered_weights - weights)))
        for P, w, s, t in zip(E.parts, weights, parts, recovered):
            if w > E.tol.eq:
                residual = max(residual, state_distance(P, s, t))
        return residual, dict(weights=weights)
    return trial


class TheoremSuite(Suite):
    name = "theorems"

    def checks(self, E):
        plan = {name: Check(factory, threshold) for name, (factory, threshold) in DERIVED.items()}
        plan.update(
            context_cardinality=Check(context_cardinality, 0.0),
            transition_symmetry=Check(transition_symmetry, 1e-12),
            state_uniqueness=Check(state_uniqueness, 1e-6),
            componentwise_order=Check(componentwise_order, 0.0),
            componentwise_sharpness=Check(componentwise_sharpness, 0.0),
            state_hull=Check(state_hull),
        )
        return plan


""" Commutants, centers, joint contexts and factors """


def _effect_from_hermitian(E, M):
    """The affine image of a Hermitian member of the span with spectrum stretched onto [0, 1]"""
    w = np.linalg.eigvalsh(M)
    if w[-1] - w[0] <= E.tol.rank:
        return E.unit()
    return E._clamp(E.from_matrix((M - w[0] * np.eye(E.dim)) / (w[-1] - w[0]), validate=False))


def _commutant_member(E, basis, rng):
    M = linalg.hermitize(np.tensordot(rng.standard_normal(basis.dim), basis.matrices, axes=1))
    return _effect_from_hermitian(E, M)


def commutant_antitone(E, S):
    """F ⊆ G ⇒ G′ ⊆ F′ on a sampled member of G′"""
    def trial(rng):
        F = [S.effect(rng)]
        G = F + [S.effect(rng)]
        b = _commutant_member(E, commutant_basis(E, G), rng)
        return (0.0 if in_commutant(E, b, F) else 1.0), dict(F=F, G=G, b=b)
    return trial


def double_commutant(E, S):
    """F ⊆ F″: every member of F commutes with a basis of F′"""
    def trial(rng):
        F = [S.effect(rng) for _ in range(int(rng.integers(1, 3)))]
        members = [_effect_from_hermitian(E, X) for X in commutant_basis(E, F).matrices]
        return max(E.commutator_norm(x, m) for x in F for m in members), dict(F=F)
    return trial


def commutant_commutes(E, S):
    def trial(rng):
        F = [S.effect(rng) for _ in range(int(rng.integers(1, 3)))]
        return commutant_basis(E, F).max_commutator(), dict(F=F)
    return trial


def one_dimensional_sharp_commute(E, S):
    """For one-dimensional a and sharp b: a | b ⇔ a∘b = 0 or a ≤ b"""
    def trial(rng):
        a = S.one_dimensional(rng)
        if rng.uniform() < 0.5:
            ctx, _ = context_representation(E, a)
            subset = rng.uniform(size=len(ctx)) < 0.5
            b = E._clamp(E.combine(ctx.vectors[:, subset], np.ones(int(subset.sum()))))
        else:
            b = S.sharp(rng)
        return agreement((commutes(E, a, b), is_zero(E, seq(E, a, b)) or le(E, a, b))), dict(a=a, b=b)
    return trial


def joint_context_reproduces(E, S):
    def trial(rng):
        a, b = S.commuting(rng, 2)
        ctx = joint_context(E, a, b)
        residual = max(
            [context_residual(E, ctx, a), context_residual(E, ctx, b)]
            + list(context_residuals(E, ctx.members, ctx.vectors).values())
        )
        return residual, dict(a=a, b=b)
    return trial


def noncommuting_detected(E, S):
    if center_basis(E).dim == len(algebra_span(E)):
        return lambda rng: (None, {})

    def trial(rng):
        a, b = S.effect(rng), S.effect(rng)
        return (1.0 if commutes(E, a, b) else 0.0), dict(a=a, b=b)
    return trial


def factorization_reconstructs(E, S):
    def trial(rng):
        decomposition = factorize(E, seed=int(rng.integers(2 ** 31)))
        panel = [S.effect(rng) for _ in range(4)]
        return max(decomposition.verify(panel).values()), dict(dims=decomposition.dims)
    return trial


def factor_split_consistency(E, S):
    """E is a factor exactly when no minimal central sharp splits it"""
    def trial(rng):
        admissible = False
        for z in minimal_central_sharps(E, seed=int(rng.integers(2 ** 31))):
            try:
                central_split(E, z)
                admissible = True
            except errors.TrivialSplit:
                pass
        return agreement((is_factor(E), not admissible)), {}
    return trial


class StructureSuite(Suite):
    name = "structure"

    def checks(self, E):
        return dict(
            commutant_antitone=Check(commutant_antitone, share=0.2),
            double_commutant=Check(double_commutant, share=0.2),
            commutant_commutes=Check(commutant_commutes, share=0.2),
            one_dimensional_sharp_commute=Check(one_dimensional_sharp_commute, 0.0),
            joint_context_reproduces=Check(joint_context_reproduces),
            noncommuting_detected=Check(noncommuting_detected, 0.0),
            factorization_reconstructs=Check(factorization_reconstructs, share=0.05),
            factor_split_consistency=Check(factor_split_consistency, 0.0, share=0.05),
        )


""" Spectra, norms and pseudo-inverses """


def _norm(E, b):
    return spectrum_stats(E, b).norm


def spectral_reconstruction(E, S):
    def trial(rng):
        b = S.effect(rng)
        form = spectral_form(E, b)
        total = E.from_matrix(sum(E.to_matrix(c) for c in form.eigeneffects), validate=False)
        residual = max(
            [distance(E, form.reconstruct(E), b), E.distance(total, E.unit())]
            + [E.distance(seq(E, c, c), c) for c in form.eigeneffects]
            + [E.distance(seq(E, x, y), E.zero()) for i, x in enumerate(form.eigeneffects)
               for y in form.eigeneffects[i + 1:]]
        )
        return residual, dict(b=b)
    return trial


def spectral_idempotent(E, S):
    def trial(rng):
        b = S.effect(rng)
        first = spectral_form(E, b)
        second = spectral_form(E, first.reconstruct(E))
        if len(first) != len(second):
            return np.inf, dict(b=b)
        residual = max(
            [float(np.max(np.abs(first.eigenvalues - second.eigenvalues)))]
            + [E.distance(x, y) for x, y in zip(first.eigeneffects, second.eigeneffects)]
        )
        return residual, dict(b=b)
    return trial


def eigeneffects_commute(E, S):
    def trial(rng):
        b = S.effect(rng)
        return max(seq_commutator(E, c, b) for c in spectral_form(E, b).eigeneffects), dict(b=b)
    return trial


def numerical_range(E, S):
    """m(b) ≤ ω(b) ≤ M(b), with both ends attained by hat states of the extreme context members"""
    def trial(rng):
        b, state = S.effect(rng), S.state(rng)
        stats = spectrum_stats(E, b)
        value = pair(E, state, b)
        ctx, coefficients = context_representation(E, b)
        low = pair(E, hat_state(E, ctx[int(np.argmin(coefficients))]), b)
        high = pair(E, hat_state(E, ctx[int(np.argmax(coefficients))]), b)
        residual = max(stats.minimum - value, value - stats.maximum, abs(low - stats.minimum),
                       abs(high - stats.maximum), 0.0)
        return residual, dict(b=b, state=state)
    return trial


def norm_triangle(E, S):
    def trial(rng):
        a, b = S.orthogonal_pair(rng)
        return max(0.0, _norm(E, oplus(E, a, b)) - _norm(E, a) - _norm(E, b) - E.tol.eq), dict(a=a, b=b)
    return trial


def norm_faithful(E, S):
    def trial(rng):
        u = rng.uniform()
        b = E.zero() if u < 0.25 else E._scale(1e-3 if u < 0.5 else 1.0, S.effect(rng))
        return agreement((_norm(E, b) <= E.tol.eq, is_zero(E, b))), dict(b=b)
    return trial


def norm_monotone(E, S):
    """a ≤ b ⇒ ‖a‖ ≤ ‖b‖, and a ≤ ‖a‖ 1"""
    def trial(rng):
        a, b = S.dominated_pair(rng)
        residual = max(
            max(0.0, _norm(E, a) - _norm(E, b) - E.tol.eq),
            order_violation(E, a, E._scale(_norm(E, a), E.unit())),
        )
        return residual, dict(a=a, b=b)
    return trial


def norm_submultiplicative(E, S):
    def trial(rng):
        a, b = S.effect(rng), S.effect(rng)
        return max(0.0, _norm(E, seq(E, a, b)) - _norm(E, a) * _norm(E, b) - E.tol.eq), dict(a=a, b=b)
    return trial


def spectrum_scaling(E, S):
    """σ(λb) = λσ(b) and ‖λb‖ = λ‖b‖"""
    def trial(rng):
        lam, b = float(rng.uniform(0.05, 1.0)), S.effect(rng)
        scaled, stats = spectrum_stats(E, E._scale(lam, b)), spectrum_stats(E, b)
        if len(scaled.spectrum) != len(stats.spectrum):
            return np.inf, dict(lam=lam, b=b)
        residual = max(
            abs(scaled.norm - lam * stats.norm),
            float(np.max(np.abs(np.array(scaled.spectrum) - lam * np.array(stats.spectrum)))),
        )
        return residual, dict(lam=lam, b=b)
    return trial


def pseudo_inverse_equations(E, S):
    """⌈b⌉ = ⌈a⌉, ‖b‖ = 1 and a∘b = b∘a = λ(a)⌈a⌉ for b = a⁻¹"""
    def trial(rng):
        a = S.effect(rng)
        if is_zero(E, a):
            return None, dict(a=a)
        b, lam = pseudo_inverse(E, a)
        target = E._scale(lam, ceiling(E, a))
        residual = max(
            E.distance(ceiling(E, b), ceiling(E, a)),
            abs(_norm(E, b) - 1.0),
            E.distance(seq(E, a, b), target),
            E.distance(seq(E, b, a), target),
        )
        return residual, dict(a=a)
    return trial


def pseudo_inverse_scale_invariant(E, S):
    def trial(rng):
        mu, a = float(rng.uniform(0.1, 1.0)), S.effect(rng)
        return E.distance(pseudo_inverse(E, E._scale(mu, a))[0], pseudo_inverse(E, a)[0]), dict(mu=mu, a=a)
    return trial


# Coefficient grid searched for alternative pseudo-inverses; contains every ratio of two of the eigenvalue levels
INVERSE_GRID = np.linspace(0.0, 1.0, 41)
INVERSE_LEVELS = (0.2, 0.4, 0.5, 0.8, 1.0)


def pseudo_inverse_unique(E, S):
    """Exhaustive search over the coefficient grid on a support of at most two context members: exactly one x with
    ‖x‖ = 1 supported on ⌈a⌉ solves a∘x = λ(a)⌈a⌉, and it is the pseudo-inverse"""
    def trial(rng):
        ctx, _ = context_representation(E, S.effect(rng))
        k = int(rng.integers(1, min(2, len(ctx)) + 1))
        support = ctx.vectors[:, rng.choice(len(ctx), size=k, replace=False)]
        a = E._clamp(E.combine(support, rng.choice(INVERSE_LEVELS, size=k)))
        expected, lam = pseudo_inverse(E, a)
        target = E._scale(lam, ceiling(E, a))
        solutions = []
        for mu in itertools.product(INVERSE_GRID, repeat=k):
            if max(mu) < 1.0:
                continue
            x = E.combine(support, mu)
            if E.distance(seq(E, a, x), target) <= E.tol.eq:
                solutions.append(x)
        if len(solutions) != 1:
            return 1.0, dict(a=a, solutions=len(solutions))
        return E.distance(solutions[0], expected), dict(a=a)
    return trial


def invertible_sum(E, S):
    def trial(rng):
        a = sample_invertible(E, rng)
        b = E._scale(float(rng.uniform()), complement(E, a))
        return agreement((is_invertible(E, oplus(E, a, b)), True)), dict(a=a, b=b)
    return trial


def inverse_involution(E, S):
    def trial(rng):
        a = sample_invertible(E, rng)
        return max(involution_residuals(E, a).values()), dict(a=a)
    return trial


def inverse_lambda_bound(E, S):
    """λ(a∘b) ≥ λ(a)λ(b)"""
    def trial(rng):
        a, b = sample_invertible(E, rng), sample_invertible(E, rng)
        lam_a, lam_b, lam_ab = audit_inverse_preserving(E, a, b).lambdas
        return max(0.0, lam_a * lam_b - lam_ab - 1e-12), dict(a=a, b=b)
    return trial


def inverse_proportional(E, S):
    def trial(rng):
        a, b = sample_invertible(E, rng), sample_invertible(E, rng)
        return audit_inverse_preserving(E, a, b).proportional_residual, dict(a=a, b=b)
    return trial


class SpectralSuite(Suite):
    name = "spectral"

    def checks(self, E):
        return dict(
            spectral_reconstruction=Check(spectral_reconstruction),
            spectral_idempotent=Check(spectral_idempotent),
            eigeneffects_commute=Check(eigeneffects_commute),
            numerical_range=Check(numerical_range),
            norm_triangle=Check(norm_triangle, 0.0),
            norm_faithful=Check(norm_faithful, 0.0),
            norm_monotone=Check(norm_monotone, 0.0),
            norm_submultiplicative=Check(norm_submultiplicative, 0.0),
            spectrum_scaling=Check(spectrum_scaling),
            pseudo_inverse_equations=Check(pseudo_inverse_equations),
            pseudo_inverse_scale_invariant=Check(pseudo_inverse_scale_invariant),
            pseudo_inverse_unique=Check(pseudo_inverse_unique),
            invertible_sum=Check(invertible_sum, 0.0),
            inverse_involution=Check(inverse_involution),
            inverse_lambda_bound=Check(inverse_lambda_bound, 0.0),
            inverse_proportional=Check(inverse_proportional),
        )


""" Conditioning """


def conditioned_state_valid(E, S):
    """ω(· | b) is normalized, positive and additive"""
    def trial(rng):
        state, b = S.state(rng), S.effect(rng)
        if pair(E, state, b) <= E.tol.eq:
            return None, dict(state=state, b=b)
        conditioned = condition(E, state, b)
        x, y = S.orthogonal_pair(rng)
        residual = max(
            abs(pair(E, conditioned, E.unit()) - 1.0),
            abs(pair(E, conditioned, oplus(E, x, y)) - pair(E, conditioned, x) - pair(E, conditioned, y)),
            max(0.0, -pair(E, conditioned, x)),
        )
        return residual, dict(state=state, b=b)
    return trial


def gamma_identities(E, S):
    def trial(rng):
        if rng.uniform() < 0.5:
            a, b, c = S.commuting(rng, 3, orthogonal=True)
        else:
            (a, b), c = S.orthogonal_pair(rng), S.effect(rng)
        if rng.uniform() < 0.2:
            a = E.zero()
        state = zero_state(E) if rng.uniform() < 0.05 else S.state(rng)
        report = verify_gamma_identities(E, a, b, c, state)
        return report.max_residual, dict(a=a, b=b, c=c, state=state)
    return trial


def universal_conditioning(E, S):
    """ω(· | a) does not depend on ω for one-dimensional a"""
    def trial(rng):
        a, first, second = S.one_dimensional(rng), S.state(rng), S.state(rng)
        if min(pair(E, first, a), pair(E, second, a)) <= E.tol.eq:
            return None, dict(a=a)
        return state_distance(E, condition(E, first, a), condition(E, second, a)), dict(a=a)
    return trial


def gamma_fixed_point_is_hat(E, S):
    def trial(rng):
        a, start = S.one_dimensional(rng), S.state(rng)
        if pair(E, start, a) <= E.tol.eq:
            return None, dict(a=a)
        fixed = gamma_fixed_point(E, a, start)
        if not fixed.converged:
            return np.inf, dict(a=a, start=start)
        return state_distance(E, fixed.state, hat_state(E, a)), dict(a=a, start=start)
    return trial


def certainty_one_dimensional(E, S):
    """For sharp a: exactly one state certain of a ⇔ a is one-dimensional"""
    def trial(rng):
        a = S.one_dimensional(rng) if rng.uniform() < 0.5 else S.sharp(rng)
        unique = unique_certainty_state(E, a).verdict == UNIQUE
        return agreement((unique, is_one_dimensional(E, a))), dict(a=a)
    return trial


def dispersion_free_agreement(E, S):
    """ω(b∘b) = ω(b)² agrees with b being constant ω-almost everywhere, and the constructed decomposition holds"""
    def trial(rng):
        start = S.state(rng)
        if rng.uniform() < 0.5:
            p = S.sharp(rng)
            if pair(E, start, p) <= E.tol.eq:
                return None, dict(p=p)
            state, lam = condition(E, start, p), float(rng.uniform())
            b = oplus(E, E._scale(lam, p), seq(E, complement(E, p), S.effect(rng)))
        else:
            state, b = start, S.effect(rng)
        verdict = dispersion_analysis(E, state, b)
        ctx, coefficients = context_representation(E, b)
        spread = float(np.sum(context_masses(E, state, ctx) * (coefficients - verdict.value) ** 2))
        residual = agreement((verdict.dispersion_free, spread <= E.tol.eq))
        if verdict.dispersion_free:
            residual = max([residual] + list(verdict.residuals.values()))
        return residual, dict(state=state, b=b)
    return trial


def order_determination(E, S):
    def trial(rng):
        a, b = S.dominated_pair(rng) if rng.uniform() < 0.5 else (S.effect(rng), S.effect(rng))
        return (0.0 if order_determined(E, a, b).agree else 1.0), dict(a=a, b=b)
    return trial


def hat_state_laws(E, S):
    def trial(rng):
        a = S.one_dimensional(rng)
        report = verify_hat_state_laws(E, a, [S.effect(rng) for _ in range(3)], [S.state(rng) for _ in range(2)])
        return max(report.residuals.values()), dict(a=a)
    return trial


class ConditioningSuite(Suite):
    name = "conditioning"

    def checks(self, E):
        return dict(
            conditioned_state_valid=Check(conditioned_state_valid),
            gamma_identities=Check(gamma_identities),
            universal_conditioning=Check(universal_conditioning, 1e-6),
            gamma_fixed_point_is_hat=Check(gamma_fixed_point_is_hat, 1e-6),
            certainty_one_dimensional=Check(certainty_one_dimensional, 0.0),
            dispersion_free_agreement=Check(dispersion_free_agreement),
            order_determination=Check(order_determination, 0.0),
            hat_state_laws=Check(hat_state_laws),
        )


""" Representation on context spaces (full Hilbertian algebras) """


def _full_hilbertian_only(trial):
    def wrapped(E, S):
        if E.name != "hilbertian" or not E.is_full:
            return lambda rng: (None, {})
        return trial(E, S)
    return wrapped


def _haar_context(E, rng):
    return context_from_unitary(E, linalg.haar_unitary(rng, E.dim))


@_full_hilbertian_only
def comparability_laws(E, S):
    def trial(rng):
        data = canonical_unitaries(E, [_haar_context(E, rng) for _ in range(3)])
        return data.max_residual, dict(residuals=data.residuals)
    return trial


@_full_hilbertian_only
def readout_laws(E, S):
    """L_b is additive, unit-preserving and complement-compatible, and all L_b commute"""
    def trial(rng):
        A = _haar_context(E, rng)
        b, c = S.orthogonal_pair(rng)
        Lb, Lc = L_operator(E, b, A), L_operator(E, c, A)
        identity = np.eye(len(A))
        residual = max(
            float(np.linalg.norm(L_operator(E, oplus(E, b, c), A) - Lb - Lc)),
            float(np.linalg.norm(L_operator(E, E.unit(), A) - identity)),
            float(np.linalg.norm(L_operator(E, complement(E, b), A) - (identity - Lb))),
            float(np.linalg.norm(Lb @ Lc - Lc @ Lb)),
        )
        return residual, dict(b=b, c=c)
    return trial


@_full_hilbertian_only
def context_independence(E, S):
    """Ũ_BA(b̃) = Ũ_CA(b̃) for b representable in both B and C"""
    def trial(rng):
        phi = support_vector(E, S.one_dimensional(rng))
        P = E._clamp(E.combine(phi[:, None], [1.0]))
        lam, mu = rng.uniform(size=2)
        b = E._add(E._scale(float(lam), P), E._scale(float(mu), complement(E, P)))
        completions = []
        for _ in range(2):
            R = rng.standard_normal((E.dim, E.dim - 1)) + 1j * rng.standard_normal((E.dim, E.dim - 1))
            Q, _ = scipy.linalg.qr(np.concatenate([phi[:, None], R], axis=1))
            completions.append(context_from_unitary(E, Q))
        data = canonical_unitaries(E, [_haar_context(E, rng)] + completions)
        images = [transport(data, k, 0, tilde(E, b, data.contexts[k])) for k in (1, 2)]
        return float(np.linalg.norm(images[0] - images[1])), dict(b=b)
    return trial


@_full_hilbertian_only
def representation_morphism(E, S):
    def trial(rng):
        report = representation_self_test(E, seed=int(rng.integers(2 ** 31)), n_contexts=2, panel_size=3)
        return report.max_residual, dict(residuals=report.residuals)
    return trial


class RepresentationSuite(Suite):
    name = "representation"

    def checks(self, E):
        return dict(
            comparability_laws=Check(comparability_laws, share=0.2),
            readout_laws=Check(readout_laws),
            context_independence=Check(context_independence, share=0.2),
            representation_morphism=Check(representation_morphism, 1e-8, share=0.05),
        )


class CombinedSuite(Suite):
    """Every suite in turn"""
    name = "all"
    parts = (AxiomSuite, TheoremSuite, StructureSuite, SpectralSuite, ConditioningSuite, RepresentationSuite)

    def checks(self, E):
        plan = {}
        for cls in self.parts:
            plan.update(cls().checks(E))
        return plan

    def run(self, E, n_samples=100, seed=0, progress=False, workers=1):
        selected = set(self.plan(E))
        results = {}
        for cls in self.parts:
            suite = cls(samples=self.samples, boundary=self.boundary)
            names = [name for name in suite.checks(E) if name in selected]
            if names:
                suite.only = names
                results.update(suite.run(E, n_samples, seed, progress, workers))
        return results
