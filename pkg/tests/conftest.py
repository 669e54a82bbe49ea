import random

import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jetnorm.jets import MatrixJet, monomials_upto
from jetnorm.scalars import GaussianRational

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-6, 6), st.integers(1, 4))
gaussians = st.builds(GaussianRational, rationals, rationals)


@st.composite
def matrix_jets(draw, m=None, n=None, p=None, N=None, lo=0, coeffs=rationals):
    m = draw(st.integers(1, 2)) if m is None else m
    n = draw(st.integers(1, 2)) if n is None else n
    p = draw(st.integers(1, 2)) if p is None else p
    N = draw(st.integers(1, 3)) if N is None else N
    monos = monomials_upto(p, lo, N)
    grid = []
    for _ in range(m):
        row = []
        for _ in range(n):
            chosen = draw(st.lists(st.sampled_from(monos), max_size=3, unique=True)) if monos else []
            row.append({I: draw(coeffs) for I in chosen})
        grid.append(row)
    return MatrixJet.from_terms(grid, p, N)


@st.composite
def jet_pairs(draw, same_shape=True, coeffs=rationals):
    m, n, p, N = draw(st.integers(1, 2)), draw(st.integers(1, 2)), draw(st.integers(1, 2)), draw(st.integers(1, 3))
    A = draw(matrix_jets(m, n, p, N, coeffs=coeffs))
    B = draw(matrix_jets(m, n, p, N, coeffs=coeffs))
    return A, B


@pytest.fixture
def rng():
    return random.Random(12345)
