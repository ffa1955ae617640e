import itertools

import numpy as np
import pytest

from conftest import make_algebra
from src.effects import errors
from src.effects.core import equal, seq
from src.backends import ClassicalAlgebra
from src.backends.contexts import is_sharp
from src.backends.linalg import projector
from src.spectral import (
    audit_inverse_preserving, ceiling, context_representation, inverse, inverse_preservation_sweep,
    involution_residuals, is_eigeneffect, is_invertible, pseudo_inverse, spectral_form, spectrum_stats,
)

E1 = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)
B = [[0.5, 0.25], [0.25, 0.5]]


def diag(*values):
    return np.diag(np.asarray(values, dtype=complex))


def test_spectral_form_scalar(h3):
    form = spectral_form(h3, h3.effect(0.4 * np.eye(3)))
    assert np.allclose(form.eigenvalues, [0.4])
    assert equal(h3, form.eigeneffects[0], h3.unit())
    assert form.multiplicities == (3,)


def test_spectral_form_diagonal(h3):
    form = spectral_form(h3, h3.effect(diag(0.3, 0.3, 0.9)))
    (l1, c1), (l2, c2) = form.pairs()
    assert (l1, l2) == pytest.approx((0.9, 0.3))
    assert np.allclose(c1.payload, diag(0, 0, 1)) and np.allclose(c2.payload, diag(1, 1, 0))
    assert np.allclose(np.abs(form.context.vectors), np.eye(3))
    assert np.allclose(form.coefficients, [0.3, 0.3, 0.9])


def test_spectral_form_rotated(h2):
    b = h2.effect(B)
    form = spectral_form(h2, b)
    assert np.allclose(form.eigenvalues, [0.75, 0.25])
    assert np.allclose(form.eigeneffects[0].payload, projector(PLUS))
    assert np.allclose(form.eigeneffects[1].payload, projector(MINUS))
    ctx, coefficients = context_representation(h2, b)
    assert np.allclose(coefficients, [0.75, 0.25])
    assert equal(h2, form.reconstruct(h2), b)
    assert form.smallest_nonzero == pytest.approx(0.25)


def test_spectral_form_includes_zero(h3):
    form = spectral_form(h3, h3.effect(diag(0.0, 0.5, 0.5)))
    assert np.allclose(form.eigenvalues, [0.5, 0.0])
    total = sum(c.payload for c in form.eigeneffects)
    assert np.allclose(total, np.eye(3))
    assert form.smallest_nonzero == pytest.approx(0.5)
    assert spectral_form(h3, h3.zero()).smallest_nonzero is None


def test_spectral_form_is_idempotent(algebra, rng):
    b = algebra.sample_effect(rng)
    form = spectral_form(algebra, b)
    again = spectral_form(algebra, form.reconstruct(algebra))
    assert np.allclose(form.eigenvalues, again.eigenvalues, atol=1e-9)
    for c, d in zip(form.eigeneffects, again.eigeneffects):
        assert algebra.distance(c, d) < 1e-9
        assert is_sharp(algebra, c)
        assert algebra.commutator_norm(c, b) < 1e-9


def test_classical_spectral_form_level_sets():
    E = ClassicalAlgebra(4)
    form = spectral_form(E, E.effect([0.2, 0.8, 0.2, 0.0]))
    assert np.allclose(form.eigenvalues, [0.8, 0.2, 0.0])
    assert np.allclose(form.eigeneffects[1].payload, [1, 0, 1, 0])


def test_spectrum_stats(h2):
    stats = spectrum_stats(h2, h2.effect(diag(0.2, 0.7)))
    assert stats.spectrum == pytest.approx((0.2, 0.7))
    assert stats.numerical_range == pytest.approx((0.2, 0.7))
    assert stats.norm == pytest.approx(0.7)
    assert spectrum_stats(h2, h2.effect(B)).norm == pytest.approx(0.75)


def test_spectrum_scaling(h3, rng):
    b = h3.sample_effect(rng)
    lam = 0.35
    scaled = spectrum_stats(h3, h3._scale(lam, b))
    assert np.allclose(scaled.spectrum, lam * np.array(spectrum_stats(h3, b).spectrum), atol=1e-9)


def test_is_eigeneffect(h2, rng):
    b = h2.effect(diag(0.3, 0.9))
    assert is_eigeneffect(h2, h2.sample_one_dimensional(rng), h2.unit()) == (True, pytest.approx(1.0))
    assert is_eigeneffect(h2, h2.effect(projector(E1)), b) == (True, pytest.approx(0.3))
    assert is_eigeneffect(h2, h2.effect(projector(PLUS)), b) == (False, None)
    with pytest.raises(errors.NotOneDimensional):
        is_eigeneffect(h2, b, b)


def test_ceiling(h2, h3):
    assert np.allclose(ceiling(h3, h3.effect(diag(0.3, 0.0, 0.7))).payload, diag(1, 0, 1))
    assert np.allclose(ceiling(h2, h2.effect([[0.5, 0.5], [0.5, 0.5]])).payload, projector(PLUS))


def test_pseudo_inverse(h2, rng):
    p = h2.sample_sharp(rng)
    if h2.rank(p) > 0:
        inv, lam = pseudo_inverse(h2, p)
        assert equal(h2, inv, p) and lam == pytest.approx(1.0)
    a = h2.effect(diag(0.5, 0.25))
    inv, lam = pseudo_inverse(h2, a)
    assert np.allclose(inv.payload, diag(0.5, 1.0)) and lam == pytest.approx(0.25)
    assert np.allclose(seq(h2, a, inv).payload, 0.25 * np.eye(2))
    assert equal(h2, pseudo_inverse(h2, h2._scale(0.5, a))[0], inv)
    with pytest.raises(errors.ZeroEffect):
        pseudo_inverse(h2, h2.zero())


def test_pseudo_inverse_is_unique(h3, rng):
    """Brute force over coefficient assignments on the eigeneffects of a; exactly one satisfies a∘x = λ(a)⌈a⌉
    with x supported on ⌈a⌉ and ‖x‖ = 1"""
    a = h3.effect(diag(0.2, 0.5, 0.0))
    expected, lam = pseudo_inverse(h3, a)
    grid = np.linspace(0.0, 1.0, 21)
    solutions = []
    for mu in itertools.product(grid, repeat=2):
        x = h3.effect(diag(mu[0], mu[1], 0.0))
        if abs(h3.max_eig(x) - 1.0) > 1e-12:
            continue
        if h3.distance(seq(h3, a, x), h3._scale(lam, ceiling(h3, a))) <= 1e-9:
            solutions.append(x)
    assert len(solutions) == 1
    assert equal(h3, solutions[0], expected)


def test_is_invertible(h2):
    assert is_invertible(h2, h2.unit())
    assert not is_invertible(h2, h2.zero())
    assert not is_invertible(h2, h2.effect(diag(0.3, 0.0)))
    assert is_invertible(h2, h2.effect(B))
    with pytest.raises(errors.NotInvertible):
        inverse(h2, h2.effect(diag(0.3, 0.0)))


def test_involution(h3, rng):
    a = h3._add(h3._scale(0.7, h3.sample_effect(rng)), h3._scale(0.3, h3.unit()))
    residuals = involution_residuals(h3, a)
    assert max(residuals.values()) < 1e-9


def test_audit_commuting_is_exact(h2):
    audit = audit_inverse_preserving(h2, h2.effect(diag(0.5, 0.25)), h2.effect(diag(0.4, 0.2)))
    assert audit.exact and audit.proportional
    assert audit.scalar == pytest.approx(1.0)


def test_audit_classical_counterexample():
    E = ClassicalAlgebra(2)
    audit = audit_inverse_preserving(E, E.effect([0.5, 1.0]), E.effect([1.0, 0.5]))
    assert not audit.exact and audit.proportional
    assert audit.scalar == pytest.approx(0.5)
    assert np.allclose(audit.lhs.payload, [1.0, 1.0]) and np.allclose(audit.rhs.payload, [0.5, 0.5])


def test_audit_hilbertian_counterexample(h2):
    audit = audit_inverse_preserving(h2, h2.effect(diag(1.0, 0.5)), h2.effect([[0.75, 0.25], [0.25, 0.75]]))
    assert not audit.exact and audit.proportional
    assert audit.lambdas[2] == pytest.approx((9 - np.sqrt(17)) / 16)
    assert audit.scalar == pytest.approx(0.25 / ((9 - np.sqrt(17)) / 16))


def test_audit_requires_invertible(h2):
    with pytest.raises(errors.NotInvertible) as info:
        audit_inverse_preserving(h2, h2.unit(), h2.effect(diag(0.3, 0.0)))
    assert info.value.name == "b"


@pytest.mark.parametrize("name", ["c3", "h2", "ds213"])
def test_inverse_sweep(name):
    sweep = inverse_preservation_sweep(make_algebra(name), n_samples=30, seed=4)
    assert sweep.proportional == sweep.samples
    assert sweep.max_lambda_excess <= 1e-12
    assert sweep.max_scalar <= 1.0 + 1e-9
