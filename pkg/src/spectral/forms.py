""" Spectral forms b = ⊕ λ'_i c_i, context representations, spectra and eigeneffects """
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.effects.core import Algebra, Effect, check_same, seq
from src.backends import linalg
from src.backends.contexts import Context, context_from_vectors, hat_state, require_one_dimensional
from src.backends.states import pair


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """Distinct eigenvalues in decreasing order with their sharp eigeneffects (eigenvalue 0 included, so the
    eigeneffects always sum to the unit), plus a refining context and its coefficients"""
    eigenvalues: np.ndarray
    eigeneffects: Tuple[Effect, ...]
    multiplicities: Tuple[int, ...]
    context: Context
    coefficients: np.ndarray
    tol: float

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def minimum(self):
        """m(b)"""
        return float(self.eigenvalues[-1])

    @property
    def maximum(self):
        """M(b), which is also ‖b‖"""
        return float(self.eigenvalues[0])

    @property
    def smallest_nonzero(self) -> Optional[float]:
        """λ(b); None for b = 0"""
        nonzero = self.eigenvalues[self.eigenvalues > self.tol]
        return float(nonzero[-1]) if len(nonzero) else None

    def pairs(self):
        return list(zip(self.eigenvalues.tolist(), self.eigeneffects))

    def reconstruct(self, E: Algebra) -> Effect:
        return E.combine(self.context.vectors, self.coefficients)


def _natural_order(vectors, values, tol):
    """Columns sorted by their first significant coordinate, ties by decreasing eigenvalue"""
    keys = [(int(np.flatnonzero(np.abs(v) > tol)[0]), -w) for v, w in zip(vectors.T, values)]
    return sorted(range(len(keys)), key=lambda i: keys[i])


def spectral_form(E: Algebra, b: Effect) -> SpectralForm:
    check_same(E, b)
    w, V = E.eigensystem(b)
    representatives, groups = linalg.cluster_values(w, E.tol.cluster)
    representatives = np.clip(representatives, 0.0, 1.0)
    eigeneffects = tuple(E._clamp(E.combine(V[:, g], np.ones(len(g)))) for g in groups)
    coefficients = np.zeros(len(w))
    for lam, g in zip(representatives, groups):
        coefficients[g] = lam
    order = _natural_order(V, coefficients, E.tol.cluster)
    context = context_from_vectors(E, V[:, order])
    return SpectralForm(
        representatives, eigeneffects, tuple(len(g) for g in groups), context, coefficients[order], E.tol.cluster
    )


def context_representation(E: Algebra, b: Effect) -> Tuple[Context, np.ndarray]:
    """A context refining the eigeneffects of b, with b = ⊕ coefficients_i a_i"""
    form = spectral_form(E, b)
    return form.context, form.coefficients


@dataclass(frozen=True)
class SpectrumStats:
    spectrum: Tuple[float, ...]
    minimum: float
    maximum: float
    numerical_range: Tuple[float, float]
    norm: float


def spectrum_stats(E: Algebra, b: Effect) -> SpectrumStats:
    form = spectral_form(E, b)
    spectrum = tuple(sorted(float(x) for x in form.eigenvalues))
    return SpectrumStats(spectrum, form.minimum, form.maximum, (form.minimum, form.maximum), form.maximum)


def is_eigeneffect(E: Algebra, a: Effect, b: Effect) -> Tuple[bool, Optional[float]]:
    """Whether b∘a = â(b) a for the one-dimensional a; the eigenvalue â(b) is returned when it is"""
    check_same(E, a, b)
    require_one_dimensional(E, a)
    value = pair(E, hat_state(E, a), b)
    residual = E.distance(seq(E, b, a), E._scale(value, a))
    if residual <= E.tol.eq:
        return True, float(value)
    return False, None
