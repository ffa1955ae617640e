""" Random inputs for the property audits """
import zlib

import numpy as np

from src.effects.core import Algebra, complement


def sample_rng(seed, name, index):
    """Generator for one sample of one check; depends only on (seed, check name, sample index)"""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode()), int(index)])


class Sampler:
    """Draws effects, scalars and states of an algebra.

    Orthogonal tuples are produced by scaling with convex weights, plus boundary pairs (a, λa′);
    commuting families are functions of one common effect.
    """

    def __init__(self, E: Algebra, boundary=0.1):
        self.E = E
        self.boundary = boundary

    def effect(self, rng):
        return self.E.sample_effect(rng)

    def scalar(self, rng):
        u = rng.uniform()
        if u < self.boundary / 2:
            return 0.0
        if u < self.boundary:
            return 1.0
        return float(rng.uniform())

    def scalars(self, rng, k, total=1.0):
        """k non-negative scalars with sum at most `total`"""
        return total * rng.dirichlet(np.ones(k + 1))[:k]

    def sharp(self, rng):
        return self.E.sample_sharp(rng)

    def one_dimensional(self, rng):
        return self.E.sample_one_dimensional(rng)

    def state(self, rng):
        return self.E.sample_state(rng)

    def orthogonal_pair(self, rng):
        E = self.E
        if rng.uniform() < 0.5:
            a = self.effect(rng)
            return a, E._scale(float(rng.uniform()), complement(E, a))
        alpha, beta = self.scalars(rng, 2)
        return E._scale(alpha, self.effect(rng)), E._scale(beta, self.effect(rng))

    def orthogonal_triple(self, rng):
        E = self.E
        alpha, beta, gamma = self.scalars(rng, 3)
        return tuple(E._scale(w, self.effect(rng)) for w in (alpha, beta, gamma))

    def function(self, rng):
        """A random increasing or decreasing map [0,1] -> [0,1]"""
        scale, power = rng.uniform(), rng.integers(1, 4)
        if rng.uniform() < 0.5:
            return lambda t: scale * np.clip(t, 0, 1) ** power
        return lambda t: scale * (1 - np.clip(t, 0, 1)) ** power

    def commuting(self, rng, k=2, orthogonal=False):
        """k effects that are functions of one common effect; with `orthogonal` their sum stays below the unit"""
        E = self.E
        x = self.effect(rng)
        fns = [self.function(rng) for _ in range(k)]
        weights = self.scalars(rng, k) if orthogonal else np.ones(k)
        return tuple(E.functional_calculus(x, lambda t, f=f, w=w: w * f(t)) for f, w in zip(fns, weights))

    def dominated_pair(self, rng):
        """(a, b) with a ≤ b"""
        E = self.E
        a = self.effect(rng)
        return a, E._add(a, E._scale(float(rng.uniform()), complement(E, a)))
