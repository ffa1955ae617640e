""" Subcommands of `cosea`. Each fills an AuditDocument from a parsed algebra document and the composed config. """
import time

import numpy as np

from src.effects import errors
from src.effects.axioms import CheckResult, Witness
from src.backends import linalg
from src.backends.contexts import context_from_unitary
from src.structure import center_basis, factorize
from src.spectral import audit_inverse_preserving, inverse_preservation_sweep, spectral_form, spectrum_stats
from src.conditioning import condition, dispersion_analysis, evaluate
from src.representation import representation_self_test
from src.cli.document import AlgebraDocument
from src.cli.report import AuditDocument, residual_check
from src.utils import registry
from src.utils.config import instantiate, to_list
from src.utils.run import get_logger

log = get_logger(__name__)

# Raised for bad input rather than by the mathematics; these abort the command with exit status 2
INPUT_ERRORS = (errors.ParseError, errors.ValidationError, errors.UnknownName, errors.IoError)


def _arguments(flags, command, counts, usage):
    args = [str(a) for a in to_list(flags.get("args") or [])]
    if len(args) not in counts:
        raise errors.ValidationError(f"usage: {usage}", name=command)
    return args


def check(report: AuditDocument, document: AlgebraDocument, flags):
    """Axiom and theorem suites"""
    E = document.algebra
    names = []
    for suite_config in flags.suites:
        suite = instantiate(registry.suite, suite_config)
        names.append(suite.name)
        results = suite.run(E, n_samples=int(flags.audit.samples), seed=report.seed,
                            progress=bool(flags.audit.progress), workers=int(flags.audit.workers))
        for result in results.values():
            report.add(result)
    report.data = dict(algebra=E.signature, suites=names, samples=int(flags.audit.samples))


def decompose(report: AuditDocument, document: AlgebraDocument, flags):
    """Factor decomposition along the minimal central sharps, checked on a sampled panel"""
    E = document.algebra
    decomposition = factorize(E, seed=report.seed, retries=int(flags.audit.generic_retries))
    rng = np.random.default_rng(report.seed)
    panel = list(document.effects.values()) + [E.sample_effect(rng) for _ in range(int(flags.audit.panel))]
    for name, residual in decomposition.verify(panel).items():
        threshold = 0.0 if name == "factor_centers" else E.tol.eq
        report.add(residual_check(f"carving_{name}", residual, threshold, group="decompose"))
    report.data = dict(
        algebra=E.signature,
        center_dimension=center_basis(E).dim,
        dims=list(decomposition.dims),
        factors=[F.signature for F in decomposition.factors],
        central_sharps=list(decomposition.sharps),
    )


def spectrum(report: AuditDocument, document: AlgebraDocument, flags):
    """Spectral form and spectrum statistics of a named effect"""
    E = document.algebra
    name, = _arguments(flags, "spectrum", {1}, "spectrum FILE EFFECT")
    b = document.effect(name)
    form, stats = spectral_form(E, b), spectrum_stats(E, b)
    report.add(residual_check("reconstruction", E.distance(form.reconstruct(E), b), E.tol.eq, group="spectrum"))
    total = E.from_matrix(sum(E.to_matrix(c) for c in form.eigeneffects), validate=False)
    report.add(residual_check("partition", E.distance(total, E.unit()), E.tol.eq, group="spectrum"))
    report.data = dict(
        effect=name,
        eigenvalues=form.eigenvalues,
        multiplicities=list(form.multiplicities),
        eigeneffects=list(form.eigeneffects),
        spectrum=list(stats.spectrum),
        minimum=stats.minimum,
        maximum=stats.maximum,
        numerical_range=list(stats.numerical_range),
        norm=stats.norm,
        smallest_nonzero=form.smallest_nonzero,
        context=form.context.vectors,
        coefficients=form.coefficients,
    )


def condition_command(report: AuditDocument, document: AlgebraDocument, flags):
    """ω(· | b) and the dispersion analysis of b under ω"""
    E = document.algebra
    state_name, effect_name = _arguments(flags, "condition", {2}, "condition FILE STATE EFFECT")
    state, b = document.state(state_name), document.effect(effect_name)
    report.data = dict(state=state_name, effect=effect_name, probability=evaluate(E, state, b))
    try:
        report.data["conditioned"] = condition(E, state, b)
    except errors.ZeroProbability as e:
        e.name = state_name
        report.record_error(e)
    verdict = dispersion_analysis(E, state, b)
    report.data["dispersion"] = dict(
        dispersion_free=verdict.dispersion_free, value=verdict.value, dispersion=verdict.dispersion,
        decomposition=verdict.decomposition,
    )
    for key, residual in verdict.residuals.items():
        report.add(residual_check(f"dispersion_{key}", residual, E.tol.eq, group="condition"))


def represent(report: AuditDocument, document: AlgebraDocument, flags):
    """Canonical comparability unitaries over the document's contexts and the self-test of J on an anchor"""
    E = document.algebra
    names, contexts = list(document.contexts), list(document.contexts.values())
    rng = np.random.default_rng(report.seed)
    while len(contexts) < int(flags.represent.contexts):
        names.append(f"haar_{len(contexts)}")
        contexts.append(context_from_unitary(E, linalg.haar_unitary(rng, E.dim)))
    anchor = flags.get("anchor") or names[0]
    if anchor not in names:
        raise errors.UnknownName(f"no context named '{anchor}' (have {names})", name=anchor)
    panel = list(document.effects.values())
    panel += [E.sample_effect(rng) for _ in range(max(0, int(flags.represent.panel) - len(panel)))]
    result = representation_self_test(E, contexts, panel, anchor=names.index(anchor), seed=report.seed)
    for key, residual in result.comparability.items():
        report.add(residual_check(f"comparability_{key}", residual, E.tol.eq, group="represent"))
    for key, residual in result.residuals.items():
        report.add(residual_check(key, residual, float(flags.represent.threshold), group="represent"))
    report.data = dict(anchor=anchor, contexts=names, panel=result.panel, conjugator=result.conjugator)


def audit_inverse(report: AuditDocument, document: AlgebraDocument, flags):
    """Inverse preservation over sampled invertible pairs and, with two names, on a named pair"""
    E = document.algebra
    pair_names = _arguments(flags, "audit-inverse", {0, 2}, "audit-inverse FILE [A B]")
    sweep = inverse_preservation_sweep(E, n_samples=int(flags.audit.samples), seed=report.seed)
    report.add(CheckResult(
        "proportional", "audit-inverse", sweep.samples, E.tol.eq,
        passed=sweep.proportional, failed=sweep.samples - sweep.proportional,
        max_residual=sweep.max_proportional_residual,
        witnesses=[Witness(w["index"], w["seed"], w["residual"], {}) for w in sweep.witnesses],
    ))
    report.add(residual_check("lambda_bound", max(0.0, sweep.max_lambda_excess), 1e-12, group="audit-inverse"))
    report.data = dict(
        samples=sweep.samples, exact=sweep.exact, proportional=sweep.proportional,
        min_scalar=sweep.min_scalar, max_scalar=sweep.max_scalar,
    )
    if pair_names:
        a_name, b_name = pair_names
        audit = audit_inverse_preserving(E, document.effect(a_name), document.effect(b_name))
        inputs = dict(a=a_name, b=b_name)
        report.add(residual_check("pair_exact", audit.exact_residual, E.tol.eq, "audit-inverse", inputs))
        report.add(residual_check("pair_proportional", audit.proportional_residual, E.tol.eq, "audit-inverse", inputs))
        report.data["pair"] = dict(
            a=a_name, b=b_name, exact=audit.exact, proportional=audit.proportional, scalar=audit.scalar,
            exact_residual=audit.exact_residual, proportional_residual=audit.proportional_residual,
            lambdas=list(audit.lambdas), lhs=audit.lhs, rhs=audit.rhs,
        )


def run_command(command, document: AlgebraDocument, flags) -> AuditDocument:
    """Dispatch `command`. Module errors are serialized into the report; input errors propagate."""
    report = AuditDocument(command, document.digest, int(flags.seed), document.algebra.tol.to_dict())
    fn = instantiate(registry.command, command, partial=True)
    start = time.perf_counter()
    try:
        fn(report, document, flags)
    except INPUT_ERRORS:
        raise
    except errors.CoseaError as e:
        report.record_error(e)
    report.wall_time = time.perf_counter() - start
    log.info(f"{command}: {len(report.checks) - len(report.failed)}/{len(report.checks)} checks passed")
    return report
