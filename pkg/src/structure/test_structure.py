import numpy as np
import pytest

from conftest import make_algebra
from src.effects import errors
from src.effects.core import equal, is_zero
from src.backends import ClassicalAlgebra, HilbertianAlgebra, context_coefficients, direct_sum, standard_context
from src.backends.contexts import context_residual
from src.backends.linalg import projector
from src.structure import (
    CommutantWitness, Refusal, atom_commutant_witness, center_basis, central_split, commutant_basis, factorize,
    in_commutant, is_factor, joint_context, minimal_central_sharps, simultaneous_atoms,
)

E1 = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


def diag(*values):
    return np.diag(np.asarray(values, dtype=complex))


def block_algebra():
    """The algebra generated on C^3 by P(e1) ⊕ 0 and P(+) ⊕ 0, i.e. M_2 ⊕ C"""
    generators = [np.pad(projector(v), ((0, 1), (0, 1))) for v in (E1, PLUS)]
    return HilbertianAlgebra(3, generators=tuple(generators))


def test_in_commutant(h2, rng):
    a = h2.sample_effect(rng)
    assert in_commutant(h2, h2.effect(0.3 * np.eye(2)), [a, h2.sample_effect(rng)])
    assert in_commutant(h2, a, [a])
    assert not in_commutant(h2, h2.effect(projector(PLUS)), [h2.effect(projector(E1))])


@pytest.mark.parametrize("members, dim", [
    ([np.eye(2)], 4),
    ([diag(0.2, 0.7)], 2),
    ([projector(E1), projector(PLUS)], 1),
])
def test_commutant_dimension(h2, members, dim):
    basis = commutant_basis(h2, [h2.effect(M) for M in members])
    assert basis.dim == dim
    assert basis.max_commutator() < 1e-9
    assert basis.contains(np.eye(2), 1e-9)


def test_classical_commutant_partition():
    E = ClassicalAlgebra(4)
    basis = commutant_basis(E, [E.effect([0.2, 0.2, 0.9, 0.9]), E.effect([0.1, 0.5, 0.5, 0.5])])
    assert basis.dim == 4
    assert basis.partition == ((0,), (1,), (2, 3))


def test_centers():
    assert is_factor(HilbertianAlgebra(3))
    classical = ClassicalAlgebra(3)
    assert center_basis(classical).dim == 3 and not is_factor(classical)
    E = direct_sum([HilbertianAlgebra(2), HilbertianAlgebra(1)])
    center = center_basis(E)
    assert center.dim == 2 and not is_factor(E)
    assert center.contains(np.diag([1.0, 1.0, 0.0]), 1e-9)
    assert center.contains(np.diag([0.0, 0.0, 1.0]), 1e-9)
    assert not center.contains(np.diag([1.0, 0.0, 0.0]), 1e-6)


def test_central_split_block_algebra():
    E = block_algebra()
    assert center_basis(E).dim == 2
    split = central_split(E, E.effect(diag(1.0, 1.0, 0.0)))
    assert split.dims == (2, 1)
    assert split.first.name == "hilbertian" and split.first.is_full
    panel = [E.effect(diag(0.2, 0.6, 0.9)), E.effect(np.pad(projector(PLUS), ((0, 1), (0, 1))))]
    residuals = split.verify(panel)
    assert max(residuals.values()) < 1e-9
    for b in panel:
        assert equal(E, split.reconstruct(split.apply(b)), b)


def test_central_split_rejects():
    E = block_algebra()
    with pytest.raises(errors.TrivialSplit):
        central_split(E, E.unit())
    with pytest.raises(errors.NotSharp):
        central_split(E, E.effect(diag(0.5, 0.5, 0.0)))
    with pytest.raises(errors.NotCentral):
        central_split(E, E.effect(diag(1.0, 0.0, 0.0)))


def test_minimal_central_sharps():
    E = HilbertianAlgebra(3)
    sharps = minimal_central_sharps(E)
    assert len(sharps) == 1 and equal(E, sharps[0], E.unit())
    classical = ClassicalAlgebra(3)
    points = minimal_central_sharps(classical, seed=5)
    assert np.allclose([z.payload for z in points], np.eye(3))
    ds = direct_sum([HilbertianAlgebra(2), HilbertianAlgebra(3)])
    first, second = minimal_central_sharps(ds, seed=1)
    assert equal(ds, first, ds.effect((np.eye(2), np.zeros((3, 3)))))
    assert equal(ds, second, ds.effect((np.zeros((2, 2)), np.eye(3))))


def test_factorize_recovers_summands(ds213, rng):
    decomposition = factorize(ds213, seed=0)
    assert decomposition.dims == (2, 1, 3)
    residuals = decomposition.verify([ds213.sample_effect(rng) for _ in range(10)])
    assert residuals["factor_centers"] == 0.0
    assert max(v for k, v in residuals.items() if k != "factor_centers") < 1e-9
    assert decomposition.direct_sum().dim == ds213.dim


@pytest.mark.parametrize("name, dims", [("h3", (3,)), ("c5", (1, 1, 1, 1, 1))])
def test_factorize_shapes(name, dims):
    decomposition = factorize(make_algebra(name))
    assert decomposition.dims == dims


def test_simultaneous_atoms(h3):
    assert len(simultaneous_atoms(h3, [h3.unit()])) == 1
    atoms = simultaneous_atoms(h3, [h3.effect(diag(0.2, 0.7, 0.7))])
    assert np.allclose(atoms[0].payload, diag(1, 0, 0)) and np.allclose(atoms[1].payload, diag(0, 1, 1))
    atoms = simultaneous_atoms(h3, [h3.effect(diag(0.2, 0.7, 0.7)), h3.effect(diag(0.5, 0.5, 0.9))])
    assert len(atoms) == 3
    for i, z in enumerate(atoms):
        assert np.allclose(z.payload, np.diag(np.eye(3)[i]), atol=1e-12)


def test_joint_context(h3):
    a, b = h3.effect(diag(0.2, 0.2, 0.9)), h3.effect(diag(0.5, 0.7, 0.7))
    ctx = joint_context(h3, a, b)
    assert np.allclose(np.abs(ctx.vectors), np.eye(3), atol=1e-12)
    assert np.allclose(context_coefficients(h3, ctx, a), [0.2, 0.2, 0.9])
    assert np.allclose(context_coefficients(h3, ctx, b), [0.5, 0.7, 0.7])
    assert context_residual(h3, ctx, a) < 1e-9 and context_residual(h3, ctx, b) < 1e-9


def test_joint_context_of_random_commuting_pair(h3, rng):
    U = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    a = h3.effect(U @ diag(0.1, 0.1, 0.8) @ U.conj().T)
    b = h3.effect(U @ diag(0.3, 0.6, 0.6) @ U.conj().T)
    ctx = joint_context(h3, a, b)
    assert context_residual(h3, ctx, a) < 1e-9 and context_residual(h3, ctx, b) < 1e-9


def test_joint_context_not_commuting(h2):
    with pytest.raises(errors.NotCommuting):
        joint_context(h2, h2.effect(projector(E1)), h2.effect(projector(PLUS)))


def test_atom_commutant_witness(h2, h3):
    witness = atom_commutant_witness(h3, h3.effect(diag(1, 0, 0)), h3.effect(diag(0.4, 0.6, 0.6)))
    assert isinstance(witness, CommutantWitness)
    assert np.allclose(witness.coefficients, [0.4, 0.6, 0.6])
    assert witness.residual < 1e-9
    lam = atom_commutant_witness(h2, h2.effect(projector(PLUS)), h2.effect(0.3 * np.eye(2)))
    assert np.allclose(lam.context[0].payload, projector(PLUS))
    assert np.allclose(lam.coefficients, [0.3, 0.3])
    refusal = atom_commutant_witness(h2, h2.effect(projector(E1)), h2.effect(projector(PLUS)))
    assert isinstance(refusal, Refusal)
    assert refusal.residual == pytest.approx(0.5)


def test_carved_classical_factor():
    E = ClassicalAlgebra(3)
    split = central_split(E, E.effect([1.0, 1.0, 0.0]))
    assert [F.name for F in split.factors] == ["classical", "classical"]
    parts = split.apply(E.effect([0.2, 0.4, 0.9]))
    assert np.allclose(parts[0].payload, [0.2, 0.4]) and np.allclose(parts[1].payload, [0.9])
    assert is_zero(E, split.reconstruct([F.zero() for F in split.factors]))
