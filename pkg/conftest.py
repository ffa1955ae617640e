import numpy as np
import pytest

from src.backends import ClassicalAlgebra, HilbertianAlgebra, direct_sum


def make_algebra(name):
    """c<n>: classical on n outcomes; h<d>: E(C^d); ds213: E(C^2) ⊕ E(C^1) ⊕ E(C^3)"""
    if name == "ds213":
        return direct_sum([HilbertianAlgebra(2), HilbertianAlgebra(1), HilbertianAlgebra(3)])
    if name.startswith("c"):
        return ClassicalAlgebra(int(name[1:]))
    return HilbertianAlgebra(int(name[1:]))


ALGEBRAS = ["c1", "c3", "c5", "h1", "h2", "h3", "h4", "ds213"]


@pytest.fixture
def rng():
    return np.random.default_rng(2357)


@pytest.fixture(params=ALGEBRAS)
def algebra(request):
    return make_algebra(request.param)


@pytest.fixture
def c2():
    return ClassicalAlgebra(2)


@pytest.fixture
def h2():
    return HilbertianAlgebra(2)


@pytest.fixture
def h3():
    return HilbertianAlgebra(3)


@pytest.fixture
def ds213():
    return make_algebra("ds213")
