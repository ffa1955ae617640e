""" Randomized audit of the effect-algebra, convexity and sequential-product axioms, plus the derived laws of
the sequential product, on any backend """
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from tqdm.auto import tqdm

from src.effects import errors
from src.effects.core import (
    Algebra, complement, distance, le, oplus, ominus, orthogonal, scalar, seq,
)
from src.effects.sampling import Sampler, sample_rng
from src.backends.contexts import is_sharp
from src.utils.run import get_logger

log = get_logger(__name__)


@dataclass
class Witness:
    index: int
    seed: int
    residual: float
    inputs: Dict
    error: Optional[str] = None


@dataclass
class CheckResult:
    name: str
    group: str
    samples: int
    threshold: float
    passed: int = 0
    failed: int = 0
    vacuous: int = 0
    max_residual: float = 0.0
    witnesses: List[Witness] = field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0


@dataclass
class AxiomReport:
    seed: int
    n_samples: int
    results: Dict[str, CheckResult]

    @property
    def ok(self):
        return all(r.ok for r in self.results.values())

    def group(self, name):
        return {k: r for k, r in self.results.items() if r.group == name}

    def failures(self):
        return [r for r in self.results.values() if not r.ok]


def run_property(name, trial: Callable, n_samples, seed, threshold, group="", max_witnesses=5, progress=False,
                 workers=1) -> CheckResult:
    """Evaluate `trial(rng) -> (residual | None, inputs)` on independent samples.

    None marks a sample whose hypothesis did not hold. A CoseaError raised by a trial counts as a failure with an
    infinite residual. Samples are merged in index order whatever the number of workers.
    """
    def evaluate(index):
        try:
            residual, inputs = trial(sample_rng(seed, name, index))
            return index, residual, inputs, None
        except errors.CoseaError as e:
            return index, math.inf, {}, f"{type(e).__name__}: {e}"

    indices = range(n_samples)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(tqdm(pool.map(evaluate, indices), total=n_samples, desc=name, disable=not progress,
                                 leave=False))
    else:
        outcomes = [evaluate(i) for i in tqdm(indices, desc=name, disable=not progress, leave=False)]

    result = CheckResult(name, group, n_samples, threshold)
    for index, residual, inputs, error in outcomes:
        if residual is None:
            result.vacuous += 1
            continue
        residual = float(residual)
        result.max_residual = max(result.max_residual, residual)
        if residual > threshold:
            result.failed += 1
            if len(result.witnesses) < max_witnesses:
                result.witnesses.append(Witness(index, seed, residual, inputs, error))
            log.debug(f"{name}: sample {index} (seed {seed}) failed with residual {residual:.3e} {error or ''}")
        else:
            result.passed += 1
    return result


""" Residual helpers """


def seq_commutator(E, a, b):
    """‖a∘b − b∘a‖ with the algebra's own product"""
    return E.distance(seq(E, a, b), seq(E, b, a))


def order_violation(E, a, b):
    """How far a ≤ b fails beyond tolerance (0 when it holds)"""
    return max(0.0, -E.order_margin(E._sub(b, a)))


def agreement(*pairs):
    """0 when every pair of booleans agrees, 1 otherwise"""
    return 0.0 if all(bool(x) == bool(y) for x, y in pairs) else 1.0


def _is_zero(E, a):
    return E.distance(a, E.zero()) <= E.tol.eq


""" Axioms """


def oplus_commutative(E, S):
    def trial(rng):
        a, b = S.orthogonal_pair(rng)
        if not orthogonal(E, b, a):
            return math.inf, dict(a=a, b=b)
        return distance(E, oplus(E, a, b), oplus(E, b, a)), dict(a=a, b=b)
    return trial


def oplus_associative(E, S):
    def trial(rng):
        a, b, c = S.orthogonal_triple(rng)
        left = oplus(E, oplus(E, a, b), c)
        right = oplus(E, a, oplus(E, b, c))
        return distance(E, left, right), dict(a=a, b=b, c=c)
    return trial


def orthosupplement(E, S):
    def trial(rng):
        a = S.effect(rng)
        return distance(E, oplus(E, a, complement(E, a)), E.unit()), dict(a=a)
    return trial


def zero_one_law(E, S):
    def trial(rng):
        u = rng.uniform()
        a = E.zero() if u < 0.25 else E._scale(1e-12 if u < 0.5 else 1.0, S.effect(rng))
        if not orthogonal(E, a, E.unit()):
            return None, dict(a=a)
        return distance(E, a, E.zero()), dict(a=a)
    return trial


def scalar_associative(E, S):
    def trial(rng):
        alpha, beta, a = S.scalar(rng), S.scalar(rng), S.effect(rng)
        left = scalar(E, alpha, scalar(E, beta, a))
        return distance(E, left, scalar(E, alpha * beta, a)), dict(alpha=alpha, beta=beta, a=a)
    return trial


def scalar_split(E, S):
    def trial(rng):
        (alpha, beta), a = S.scalars(rng, 2), S.effect(rng)
        pa, pb = scalar(E, alpha, a), scalar(E, beta, a)
        if not orthogonal(E, pa, pb):
            return math.inf, dict(alpha=alpha, beta=beta, a=a)
        return distance(E, scalar(E, alpha + beta, a), oplus(E, pa, pb)), dict(alpha=alpha, beta=beta, a=a)
    return trial


def scalar_distributive(E, S):
    def trial(rng):
        lam, (a, b) = S.scalar(rng), S.orthogonal_pair(rng)
        left = scalar(E, lam, oplus(E, a, b))
        right = oplus(E, scalar(E, lam, a), scalar(E, lam, b))
        return distance(E, left, right), dict(lam=lam, a=a, b=b)
    return trial


def scalar_unit(E, S):
    def trial(rng):
        a = S.effect(rng)
        return distance(E, scalar(E, 1.0, a), a), dict(a=a)
    return trial


def seq_additive(E, S):
    def trial(rng):
        a, (b, c) = S.effect(rng), S.orthogonal_pair(rng)
        left = seq(E, a, oplus(E, b, c))
        right = oplus(E, seq(E, a, b), seq(E, a, c))
        return distance(E, left, right), dict(a=a, b=b, c=c)
    return trial


def seq_unit(E, S):
    def trial(rng):
        a = S.effect(rng)
        return distance(E, seq(E, E.unit(), a), a), dict(a=a)
    return trial


def seq_zero_commutes(E, S):
    def trial(rng):
        if rng.uniform() < 0.5:
            p = S.sharp(rng)
            a, b = seq(E, p, S.effect(rng)), seq(E, complement(E, p), S.effect(rng))
        else:
            a, b = S.effect(rng), S.effect(rng)
        if not _is_zero(E, seq(E, a, b)):
            return None, dict(a=a, b=b)
        return seq_commutator(E, a, b), dict(a=a, b=b)
    return trial


def seq_associative_commuting(E, S):
    def trial(rng):
        (a, b), c = S.commuting(rng, 2), S.effect(rng)
        residual = max(
            seq_commutator(E, a, complement(E, b)),
            distance(E, seq(E, a, seq(E, b, c)), seq(E, seq(E, a, b), c)),
        )
        return residual, dict(a=a, b=b, c=c)
    return trial


def commutant_closure(E, S):
    def trial(rng):
        a, b, c = S.commuting(rng, 3, orthogonal=True)
        residual = max(seq_commutator(E, c, seq(E, a, b)), seq_commutator(E, c, oplus(E, a, b)))
        return residual, dict(a=a, b=b, c=c)
    return trial


def scalar_slides(E, S):
    def trial(rng):
        lam, a, b = S.scalar(rng), S.effect(rng), S.effect(rng)
        target = scalar(E, lam, seq(E, a, b))
        residual = max(
            distance(E, seq(E, scalar(E, lam, a), b), target),
            distance(E, seq(E, a, scalar(E, lam, b)), target),
        )
        return residual, dict(lam=lam, a=a, b=b)
    return trial


AXIOMS = {
    "oplus_commutative": oplus_commutative,
    "oplus_associative": oplus_associative,
    "orthosupplement": orthosupplement,
    "zero_one_law": zero_one_law,
    "scalar_associative": scalar_associative,
    "scalar_split": scalar_split,
    "scalar_distributive": scalar_distributive,
    "scalar_unit": scalar_unit,
    "seq_additive": seq_additive,
    "seq_unit": seq_unit,
    "seq_zero_commutes": seq_zero_commutes,
    "seq_associative_commuting": seq_associative_commuting,
    "commutant_closure": commutant_closure,
    "scalar_slides": scalar_slides,
}


""" Derived laws (order checks use threshold 0 on the violation beyond tolerance) """


def seq_below_first(E, S):
    def trial(rng):
        a, b = S.effect(rng), S.effect(rng)
        return order_violation(E, seq(E, a, b), a), dict(a=a, b=b)
    return trial


def seq_monotone(E, S):
    def trial(rng):
        (a, b), c = S.dominated_pair(rng), S.effect(rng)
        return order_violation(E, seq(E, c, a), seq(E, c, b)), dict(a=a, b=b, c=c)
    return trial


def sharp_iff_idempotent(E, S):
    def trial(rng):
        a = S.sharp(rng) if rng.uniform() < 0.5 else S.effect(rng)
        idempotent = E.distance(seq(E, a, a), a) <= E.tol.eq
        return agreement((is_sharp(E, a), idempotent)), dict(a=a)
    return trial


def sharp_orthogonality(E, S):
    def trial(rng):
        b = S.sharp(rng)
        a = seq(E, complement(E, b), S.effect(rng)) if rng.uniform() < 0.5 else S.effect(rng)
        return agreement((_is_zero(E, seq(E, a, b)), orthogonal(E, a, b))), dict(a=a, b=b)
    return trial


def sharp_order(E, S):
    def trial(rng):
        b, x, u = S.sharp(rng), S.effect(rng), rng.uniform()
        if u < 1 / 3:
            a = seq(E, b, x)
        elif u < 2 / 3:
            a = oplus(E, b, seq(E, complement(E, b), x))
        else:
            a = x
        ab, ba = seq(E, a, b), seq(E, b, a)
        fixes_a = E.distance(ab, a) <= E.tol.eq and E.distance(ba, a) <= E.tol.eq
        gives_b = E.distance(ab, b) <= E.tol.eq and E.distance(ba, b) <= E.tol.eq
        return agreement((le(E, a, b), fixes_a), (le(E, b, a), gives_b)), dict(a=a, b=b)
    return trial


def commute_cancellation(E, S):
    def trial(rng):
        a, c, d = S.commuting(rng, 3, orthogonal=True)
        if rng.uniform() < 0.5:
            d = seq(E, complement(E, c), S.effect(rng))
        if seq_commutator(E, a, c) > E.tol.eq or seq_commutator(E, a, oplus(E, c, d)) > E.tol.eq:
            return None, dict(a=a, c=c, d=d)
        return seq_commutator(E, a, d), dict(a=a, c=c, d=d)
    return trial


def commute_difference(E, S):
    def trial(rng):
        a, b = S.commuting(rng, 2)
        c = E._scale(float(rng.uniform()), b)
        return seq_commutator(E, a, ominus(E, b, c)), dict(a=a, b=b, c=c)
    return trial


def difference_formula(E, S):
    def trial(rng):
        c, b = S.dominated_pair(rng)
        return distance(E, oplus(E, c, ominus(E, b, c)), b), dict(b=b, c=c)
    return trial


def complement_commutes(E, S):
    def trial(rng):
        a, b = S.commuting(rng, 2)
        return seq_commutator(E, a, complement(E, b)), dict(a=a, b=b)
    return trial


DERIVED = {
    "seq_below_first": (seq_below_first, 0.0),
    "seq_monotone": (seq_monotone, 0.0),
    "sharp_iff_idempotent": (sharp_iff_idempotent, 0.0),
    "sharp_orthogonality": (sharp_orthogonality, 0.0),
    "sharp_order": (sharp_order, 0.0),
    "commute_cancellation": (commute_cancellation, None),
    "commute_difference": (commute_difference, None),
    "difference_formula": (difference_formula, None),
    "complement_commutes": (complement_commutes, None),
}


def check_axioms(E: Algebra, sampler: Sampler = None, n_samples=100, seed=0, checks=None, derived=True,
                 progress=False, workers=1) -> AxiomReport:
    """Evaluate every axiom (and by default every derived law) on `n_samples` sampled instances.

    Failures are report entries carrying (seed, index) witnesses; nothing here raises on a violated law.
    """
    sampler = sampler or Sampler(E)
    plan = [(name, "axiom", factory, E.tol.eq) for name, factory in AXIOMS.items()]
    if derived:
        plan += [(name, "derived", factory, E.tol.eq if threshold is None else threshold)
                 for name, (factory, threshold) in DERIVED.items()]
    if checks is not None:
        unknown = set(checks) - {name for name, *_ in plan}
        if unknown:
            raise errors.UnknownName(f"unknown checks {sorted(unknown)}")
        plan = [entry for entry in plan if entry[0] in set(checks)]

    results = {}
    for name, group, factory, threshold in plan:
        results[name] = run_property(name, factory(E, sampler), n_samples, seed, threshold, group=group,
                                     progress=progress, workers=workers)
        log.debug(f"{name}: {results[name].passed}/{n_samples} passed, max residual {results[name].max_residual:.3e}")
    return AxiomReport(seed, n_samples, results)
