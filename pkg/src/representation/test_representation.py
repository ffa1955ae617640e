import dataclasses

import numpy as np
import pytest

from src.effects import errors
from src.backends import (
    ClassicalAlgebra, HilbertianAlgebra, context_from_unitary, standard_context, transition_probability,
)
from src.backends.linalg import haar_unitary
from src.representation import (
    L_operator, canonical_unitaries, context_space, represent_J, representation_self_test,
    strong_comparability_residual, tilde, transported_product, validate_comparability,
)
from src.spectral import context_representation

ROTATION = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
B = [[0.5, 0.25], [0.25, 0.5]]


def diag(*values):
    return np.diag(np.asarray(values, dtype=complex))


@pytest.fixture
def family(h2):
    return canonical_unitaries(h2, [standard_context(h2), context_from_unitary(h2, ROTATION)], names=["std", "rot"])


def test_context_space(h3):
    assert context_space(h3, standard_context(h3)).dim == 3
    E = ClassicalAlgebra(1)
    assert context_space(E, standard_context(E)).dim == 1


def test_L_operator(h2):
    A = standard_context(h2)
    assert np.allclose(L_operator(h2, h2.unit(), A), np.eye(2))
    assert np.allclose(L_operator(h2, h2.effect(diag(0.3, 0.9)), A), diag(0.3, 0.9))
    # Distinct effects can share a readout
    assert np.allclose(L_operator(h2, h2.effect(B), A), diag(0.5, 0.5))


def test_canonical_unitaries(h2, family):
    single = canonical_unitaries(h2, [standard_context(h2)])
    assert np.allclose(single.unitary(0, 0), np.eye(2))
    assert single.max_residual < 1e-12
    assert np.allclose(family.unitary("std", "rot"), ROTATION)
    assert family.max_residual < 1e-9


def test_unitaries_reproduce_transitions(h3, rng):
    contexts = [context_from_unitary(h3, haar_unitary(rng, 3)) for _ in range(3)]
    data = canonical_unitaries(h3, contexts)
    U = data.unitary(0, 1)
    for i, a in enumerate(contexts[0]):
        for j, b in enumerate(contexts[1]):
            assert abs(U[j, i]) ** 2 == pytest.approx(transition_probability(h3, a, b), abs=1e-9)


def test_phase_perturbation_breaks_cocycle(h2, family):
    unitaries = dict(family.unitaries)
    unitaries[0, 1] = np.diag([1.0, 1j]) @ unitaries[0, 1]
    residuals = validate_comparability(dataclasses.replace(family, unitaries=unitaries), h2)
    assert residuals["transition"] < 1e-9
    assert residuals["cocycle"] > 0.5


def test_incomplete_family(h2, family):
    unitaries = dict(family.unitaries)
    del unitaries[1, 0]
    with pytest.raises(errors.IncompleteData):
        validate_comparability(dataclasses.replace(family, unitaries=unitaries), h2)


def test_canonical_unitaries_hilbertian_only():
    E = ClassicalAlgebra(2)
    with pytest.raises(errors.InvalidContext):
        canonical_unitaries(E, [standard_context(E)])


def test_tilde(h2):
    A = standard_context(h2)
    assert np.allclose(tilde(h2, h2.unit(), A), np.eye(2))
    assert np.allclose(tilde(h2, h2.effect(diag(0.3, 0.9)), A), diag(0.3, 0.9))
    b = h2.effect(B)
    ctx, _ = context_representation(h2, b)
    assert np.allclose(tilde(h2, b, ctx), diag(0.75, 0.25))
    with pytest.raises(errors.NotRepresentable):
        tilde(h2, b, A)


def test_represent_J(h2, family):
    b = h2.effect(diag(0.3, 0.9))
    assert np.allclose(represent_J(h2, family, "std", b), diag(0.3, 0.9))
    # J(b) on the rotated space is b in the rotated basis
    assert np.allclose(represent_J(h2, family, "rot", b), ROTATION.T @ diag(0.3, 0.9) @ ROTATION)
    with pytest.raises(errors.UnknownName):
        represent_J(h2, family, "other", b)


def test_represent_J_rejects_broken_family(h2, family):
    broken = dataclasses.replace(family, residuals=dict(cocycle=0.3))
    with pytest.raises(errors.ComparabilityViolated):
        represent_J(h2, broken, 0, h2.unit())


def test_transported_product(h2, family):
    b = h2.effect(B)
    ctx, _ = context_representation(h2, b)
    data = canonical_unitaries(h2, list(family.contexts) + [ctx])
    result = transported_product(h2, data, 0, h2.unit(), b)
    assert np.allclose(result.product, represent_J(h2, data, 0, b))
    assert result.residual < 1e-9


def test_strong_comparability(h2, family):
    x, y = h2.effect(diag(0.2, 0.1)), h2.effect(0.5 * ROTATION @ diag(0.6, 0.2) @ ROTATION.T)
    ctx, _ = context_representation(h2, h2._add(x, y))
    data = canonical_unitaries(h2, list(family.contexts) + [ctx])
    assert strong_comparability_residual(h2, data, x, y) < 1e-9


@pytest.mark.parametrize("d", [2, 3])
def test_representation_self_test(d):
    report = representation_self_test(HilbertianAlgebra(d), seed=d, panel_size=20)
    assert report.panel == 20
    assert max(report.comparability.values()) < 1e-9
    assert max(report.residuals.values()) < 1e-8
