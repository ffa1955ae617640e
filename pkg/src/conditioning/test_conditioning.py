import numpy as np
import pytest

from src.effects import errors
from src.effects.core import le
from src.backends import ClassicalAlgebra, HilbertianAlgebra, hat_state, state_distance, zero_state
from src.backends.linalg import projector
from src.conditioning import (
    MANY, NONE, UNIQUE, condition, dispersion_analysis, evaluate, gamma_apply, gamma_fixed_point,
    order_determined, unique_certainty_state, verify_gamma_identities, verify_hat_state_laws,
)
from src.effects.sampling import Sampler
from src.spectral import spectral_form

E1 = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


def diag(*values):
    return np.diag(np.asarray(values, dtype=complex))


def test_evaluate(h2, rng):
    state = h2.sample_state(rng)
    assert evaluate(h2, state, h2.unit()) == pytest.approx(1.0)
    assert evaluate(h2, h2.maximally_mixed(), h2.effect([[0.5, 0.25], [0.25, 0.5]])) == pytest.approx(0.5)
    E = ClassicalAlgebra(2)
    assert evaluate(E, E.state([0.0, 1.0]), E.effect([0.3, 0.8])) == pytest.approx(0.8)


def test_evaluate_mismatch(h2, h3):
    with pytest.raises(errors.BackendMismatch):
        evaluate(h2, h3.maximally_mixed(), h2.unit())


def test_condition(h2, rng):
    state = h2.sample_state(rng)
    assert state_distance(h2, condition(h2, state, h2.unit()), state) < 1e-12
    conditioned = condition(h2, h2.maximally_mixed(), h2.effect(projector(E1)))
    assert evaluate(h2, conditioned, h2.effect(projector(PLUS))) == pytest.approx(0.5)
    E = ClassicalAlgebra(2)
    assert np.allclose(condition(E, E.state([0.5, 0.5]), E.effect([1.0, 0.0])).payload, [1.0, 0.0])


def test_condition_zero_probability(h2):
    with pytest.raises(errors.ZeroProbability):
        condition(h2, h2.state(diag(0.0, 1.0)), h2.effect(projector(E1)))


def test_gamma_apply(h2, rng):
    state = h2.sample_state(rng)
    assert gamma_apply(h2, h2.zero(), state).is_zero
    assert state_distance(h2, gamma_apply(h2, h2.unit(), state), state) < 1e-12
    assert gamma_apply(h2, h2.sample_effect(rng), zero_state(h2)).is_zero
    assert gamma_apply(h2, h2.effect(projector(E1)), h2.state(diag(0.0, 1.0))).is_zero
    a = h2.sample_one_dimensional(rng)
    assert state_distance(h2, gamma_apply(h2, a, hat_state(h2, a)), hat_state(h2, a)) < 1e-9


def test_gamma_identities_zero_state(h3, rng):
    S = Sampler(h3)
    a, b = S.orthogonal_pair(rng)
    report = verify_gamma_identities(h3, a, b, S.effect(rng), zero_state(h3))
    assert report.max_residual == 0.0


def test_gamma_identities_commuting(h3):
    a, b, c = h3.effect(diag(0.2, 0.3, 0.1)), h3.effect(diag(0.5, 0.1, 0.4)), h3.effect(diag(0.9, 0.4, 0.6))
    report = verify_gamma_identities(h3, a, b, c, h3.maximally_mixed())
    assert not report.skipped
    assert set(report.residuals) == {
        "sum_rule", "complement_rule", "composition_rule", "gamma_commute", "product_rule", "iterated_product_rule",
    }
    assert report.max_residual < 1e-12
    assert not any(report.zero_branches.values())


def test_gamma_identities_random(h3, rng):
    S = Sampler(h3)
    for _ in range(10):
        a, b, c, state = S.effect(rng), S.effect(rng), S.effect(rng), S.state(rng)
        report = verify_gamma_identities(h3, a, b, c, state)
        assert report.residuals["product_rule"] < 1e-9
        assert report.residuals["iterated_product_rule"] < 1e-9
        assert "sum_rule" in report.skipped


def test_gamma_fixed_point_is_hat_state(h3, rng):
    a = h3.sample_one_dimensional(rng)
    fixed = gamma_fixed_point(h3, a, h3.sample_state(rng))
    assert fixed.converged and fixed.iterations <= 2
    assert state_distance(h3, fixed.state, hat_state(h3, a)) < 1e-9


@pytest.mark.parametrize("values, verdict", [
    ((1.0, 0.3), UNIQUE),
    ((1.0, 1.0, 0.3), MANY),
    ((0.9, 0.3), NONE),
])
def test_unique_certainty_state(values, verdict):
    E = HilbertianAlgebra(len(values))
    result = unique_certainty_state(E, E.effect(diag(*values)))
    assert result.verdict == verdict
    if verdict == UNIQUE:
        assert np.allclose(result.state.payload, np.diag(np.eye(len(values))[0]))
    if verdict == MANY:
        assert result.multiplicity == 2


def test_certainty_follows_spectral_clusters(h3):
    # 1 − 1.8e-7 joins the top cluster through 1 − 0.9e-7
    a = h3.effect(diag(1.0, 1.0 - 0.9e-7, 1.0 - 1.8e-7))
    result = unique_certainty_state(h3, a)
    assert result.verdict == MANY
    assert result.multiplicity == spectral_form(h3, a).multiplicities[0] == 3


def test_classical_certainty():
    E = ClassicalAlgebra(3)
    assert unique_certainty_state(E, E.effect([1.0, 0.2, 1.0])).multiplicity == 2
    result = unique_certainty_state(E, E.effect([0.2, 1.0, 0.5]))
    assert result.verdict == UNIQUE
    assert np.allclose(result.state.payload, [0.0, 1.0, 0.0])


def test_dispersion_free_point_state(h2):
    verdict = dispersion_analysis(h2, h2.state(diag(1.0, 0.0)), h2.effect(diag(0.7, 0.2)))
    assert verdict.dispersion_free
    parts = verdict.decomposition
    assert parts["scalar"] == pytest.approx(0.7)
    assert np.allclose(parts["sharp"].payload, diag(1, 0)) and np.allclose(parts["remainder"].payload, diag(0, 0.2))
    assert max(verdict.residuals.values()) < 1e-9


def test_dispersion_free_scalar(h3, rng):
    verdict = dispersion_analysis(h3, h3.sample_state(rng), h3.effect(0.4 * np.eye(3)))
    assert verdict.dispersion_free and verdict.value == pytest.approx(0.4)


def test_dispersion_free_with_stray_mass(h2):
    verdict = dispersion_analysis(h2, h2.state(diag(1.0 - 1e-10, 1e-10)), h2.effect(diag(0.7, 0.7 + 5e-8)))
    assert verdict.dispersion_free
    parts = verdict.decomposition
    assert np.allclose(parts["sharp"].payload, diag(1, 0))
    assert np.allclose(parts["remainder"].payload, diag(0, 0.7 + 5e-8), rtol=0, atol=1e-12)
    assert max(verdict.residuals.values()) <= h2.tol.eq


def test_dispersion_level_set_covers_spread_mass(h3):
    # Neither stray member alone carries more than eq, together they do
    state = h3.state(diag(1.0 - 1.2e-9, 0.6e-9, 0.6e-9))
    verdict = dispersion_analysis(h3, state, h3.effect(diag(0.7, 0.7 + 5e-8, 0.7 + 6e-8)))
    assert verdict.dispersion_free
    assert np.allclose(verdict.decomposition["sharp"].payload, diag(1, 1, 0))
    assert max(verdict.residuals.values()) <= h3.tol.eq


def test_dispersion(h2):
    verdict = dispersion_analysis(h2, h2.maximally_mixed(), h2.effect(diag(1.0, 0.0)))
    assert not verdict.dispersion_free
    assert verdict.dispersion == pytest.approx(0.25)
    assert verdict.decomposition is None


def test_hat_state_laws(h3, rng):
    S = Sampler(h3)
    a = S.one_dimensional(rng)
    report = verify_hat_state_laws(h3, a, [S.effect(rng) for _ in range(10)], [S.state(rng) for _ in range(5)])
    assert max(report.residuals.values()) < 1e-9
    assert report.conditioned_states == 50


def test_order_determined(h2, rng):
    S = Sampler(h2)
    a, b = S.dominated_pair(rng)
    report = order_determined(h2, a, b)
    assert report.agree and report.ordered
    p, q = h2.effect(projector(E1)), h2.effect(projector(PLUS))
    report = order_determined(h2, p, q)
    assert report.agree and not report.dominated and not le(h2, p, q)
