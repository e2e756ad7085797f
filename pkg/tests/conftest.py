from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from ccrfolner.symplectic import SymplecticSpace, VecX
from ccrfolner.weyl import WeylElement


@pytest.fixture
def plane():
    return SymplecticSpace(1)


@pytest.fixture
def space2():
    return SymplecticSpace(2)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def vectors(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(lambda c: VecX(tuple(c)))


def weyl_elements(space, max_terms=3):
    coeff = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(vectors(space.dim), coeff), min_size=1, max_size=max_terms).map(
        lambda pairs: WeylElement(space, dict(pairs)))


def random_element(space, rng, terms=3, lo=-3, hi=3, denom=(1, 2, 3)):
    """Random element with small rational support, for loops over many draws."""
    out = {}
    for _ in range(terms):
        q = int(rng.choice(denom))
        f = VecX(tuple(Fraction(int(x), q) for x in rng.integers(lo * q, hi * q + 1, space.dim)))
        out[f] = complex(rng.normal(), rng.normal())
    return WeylElement(space, out)


def lattice_element(model, rng, terms=3, radius=2):
    """Random element supported on the lattice of ``model``."""
    out = {}
    for _ in range(terms):
        k = rng.integers(-radius, radius + 1, model.n)
        out[model.vector(k)] = complex(rng.normal(), rng.normal())
    return WeylElement(model.space, out)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        ok, detail = results[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
