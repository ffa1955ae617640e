import pytest

from conftest import make_algebra
from src.effects import errors
from src.audit import suites
from src.audit import (
    AxiomSuite, CombinedSuite, ConditioningSuite, RepresentationSuite, SpectralSuite, StructureSuite, TheoremSuite,
)
from src.utils import registry
from src.utils.config import instantiate

SUITES = [AxiomSuite, TheoremSuite, StructureSuite, SpectralSuite, ConditioningSuite, RepresentationSuite]


@pytest.mark.parametrize("suite", SUITES, ids=lambda cls: cls.name)
@pytest.mark.parametrize("name", ["c1", "c3", "c5", "h1", "h2", "h4", "ds213"])
def test_suite_passes(suite, name):
    results = suite().run(make_algebra(name), n_samples=20, seed=0)
    assert results
    for result in results.values():
        assert result.group == suite.name
        assert result.ok, (result.name, result.max_residual, result.witnesses)


def test_direct_sum_checks_are_vacuous_elsewhere():
    results = TheoremSuite(checks=["componentwise_order", "state_hull"]).run(make_algebra("h2"), n_samples=5)
    assert all(r.vacuous == 5 and r.passed == 0 for r in results.values())


def test_representation_checks_need_full_hilbertian():
    results = RepresentationSuite(checks=["readout_laws"]).run(make_algebra("c3"), n_samples=5)
    assert results["readout_laws"].vacuous == 5


def test_sample_share():
    results = StructureSuite(checks=["factorization_reconstructs"]).run(make_algebra("h2"), n_samples=40)
    assert results["factorization_reconstructs"].samples == 2


def test_suite_samples_override():
    results = AxiomSuite(samples=7, checks=["seq_unit"]).run(make_algebra("c3"), n_samples=100)
    assert results["seq_unit"].samples == 7


def test_unknown_check():
    with pytest.raises(errors.UnknownName):
        SpectralSuite(checks=["not_a_check"]).plan(make_algebra("h2"))


def test_combined_suite_filters_across_parts():
    suite = CombinedSuite(checks=["seq_unit", "norm_monotone", "hat_state_laws"])
    results = suite.run(make_algebra("h2"), n_samples=10, seed=3)
    assert set(results) == {"seq_unit", "norm_monotone", "hat_state_laws"}
    assert {r.group for r in results.values()} == {"axioms", "spectral", "conditioning"}


def test_combined_suite_covers_every_part():
    E = make_algebra("h2")
    names = set(CombinedSuite().checks(E))
    for cls in SUITES:
        assert set(cls().checks(E)) <= names


def test_suites_from_registry():
    for name in registry.suite:
        suite = instantiate(registry.suite, {"_name_": name, "samples": 3, "checks": None})
        assert suite.name == name and suite.samples == 3
    with pytest.raises(errors.UnknownName):
        instantiate(registry.suite, "nope")


def test_runs_are_reproducible():
    E = make_algebra("ds213")
    first = SpectralSuite().run(E, n_samples=10, seed=9)
    second = SpectralSuite().run(E, n_samples=10, seed=9, workers=2)
    assert {k: r.max_residual for k, r in first.items()} == {k: r.max_residual for k, r in second.items()}


def test_pseudo_inverse_search_finds_the_inverse():
    results = SpectralSuite(checks=["pseudo_inverse_unique"]).run(make_algebra("h3"), n_samples=10, seed=4)
    assert results["pseudo_inverse_unique"].passed == 10
    assert results["pseudo_inverse_unique"].max_residual < 1e-9


def test_pseudo_inverse_search_rejects_a_wrong_inverse(monkeypatch):
    exact = suites.pseudo_inverse
    monkeypatch.setattr(suites, "pseudo_inverse", lambda E, a: (E.unit(), exact(E, a)[1]))
    results = SpectralSuite(checks=["pseudo_inverse_unique"]).run(make_algebra("h3"), n_samples=20, seed=4)
    assert results["pseudo_inverse_unique"].failed > 0
