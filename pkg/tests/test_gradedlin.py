import itertools
import math
import random

import pytest
import sympy as sp
from gmpy2 import mpq

from jetnorm.errors import GuardrailError, NotInSubspaceError
from jetnorm.gradedlin import (GradedBasis, GradedSubspace, assemble_action, decompose, kernel, preimage_nu, v_space,
                               w_complement)
from jetnorm.groups import GroupKind, lie_act
from jetnorm.jets import MatrixJet, inner_product
from jetnorm.parser import parse_poly_matrix
from jetnorm.sampling import random_jet
from oracle import brute_v_space

KINDS = list(GroupKind)


def P(text, names="x", N=3):
    return parse_poly_matrix(text, names.split(","), N)


def test_assemble_zero_and_commuting():
    assert assemble_action(MatrixJet.zeros(2, 2, 1, 3), GroupKind.TWO_SIDED, 2).rank() == 0
    assert assemble_action(P("[1 + x + x^2]"), GroupKind.CONJUGACY, 3).rank() == 0


def test_assemble_one_variable_example():
    L = assemble_action(P("[x]"), GroupKind.TWO_SIDED, 2)
    assert L.domain.dim == 4
    # images x^2, 0, -x^2, 0 (x^3 is cut by pi_2): a single independent direction
    assert L.rank() == 1
    assert kernel(L).dim == 3


def test_kernel_extremes():
    L = assemble_action(MatrixJet.zeros(1, 1, 1, 2), GroupKind.TWO_SIDED, 2)
    assert kernel(L).dim == L.domain.dim
    L = assemble_action(P("[1]"), GroupKind.LEFT, 2)
    assert kernel(L).dim == 0


def test_v_space_examples():
    V = v_space(P("[x]"), GroupKind.TWO_SIDED, 2)
    assert V.dim == 1 and V.contains(V.ambient.from_jet(P("[x^2]")))
    for j in (1, 2, 3):
        assert v_space(P("[2 + x - x^3]"), GroupKind.CONJUGACY, j).dim == 0
    A = P("[x, 0; 0, y]", "x,y")
    V = v_space(A, GroupKind.TWO_SIDED, 2)
    amb = V.ambient
    for I in ((2, 0), (1, 1), (0, 2)):
        for r, c in ((0, 1), (1, 0)):
            assert V.contains({amb.index[(I, r, c)]: mpq(1)})
    assert V.dim == 10


def test_w_complement_examples():
    amb = GradedBasis.matrix_space(1, 1, 1, 2, 2)
    zero = GradedSubspace.span(amb, [])
    assert w_complement(zero).dim == amb.dim
    full = GradedSubspace.span(amb, [{0: mpq(1)}])
    assert w_complement(full).dim == 0
    assert w_complement(v_space(P("[x + 5*x^2]"), GroupKind.TWO_SIDED, 2)).dim == 0


def test_decompose_example():
    amb = GradedBasis.matrix_space(1, 1, 2, 2, 2)
    g = amb.from_jet(P("[x^2 + x*y]", "x,y", 2))
    V = GradedSubspace.span(amb, [g])
    h = P("[x^2]", "x,y", 2)
    v, w = decompose(h, V)
    assert v == P("[2/3*x^2 + 2/3*x*y]", "x,y", 2)
    assert v + w == h
    assert inner_product(w, P("[x^2 + x*y]", "x,y", 2)) == 0
    v, w = decompose(v, V)
    assert w.is_zero()


def test_preimage_examples():
    A = P("[x]")
    V = v_space(A, GroupKind.TWO_SIDED, 2)
    nu = preimage_nu(P("[x^2]"), V)
    assert nu.nu_l == P("[1/2*x]") and nu.nu_r == P("[-1/2*x]")
    assert preimage_nu(P("[0]"), V).is_zero()
    with pytest.raises(NotInSubspaceError):
        preimage_nu(P("[x^2]"), v_space(P("[x^3]"), GroupKind.TWO_SIDED, 2))


@pytest.mark.parametrize("kind", KINDS)
def test_preimage_hits_target(kind):
    rng = random.Random(17)
    for _ in range(4):
        m = rng.randint(1, 2)
        n = m if kind.square_only else rng.randint(1, 2)
        A = random_jet(rng, m, n, 2, 3, density=0.6)
        for j in (1, 2, 3):
            V = v_space(A, kind, j)
            for gen in V.to_jets(3):
                nu = preimage_nu(gen, V)
                assert nu.kind is kind
                img = lie_act(nu, A)
                assert img.project(j - 1).is_zero() and img.homogeneous(j) == gen


@pytest.mark.parametrize("kind", KINDS)
def test_decompose_properties(kind):
    rng = random.Random(23)
    for _ in range(4):
        m = rng.randint(1, 2)
        n = m if kind.square_only else rng.randint(1, 2)
        A = random_jet(rng, m, n, 2, 3, density=0.6)
        for j in (1, 2, 3):
            V = v_space(A, kind, j)
            h = random_jet(rng, m, n, 2, 3, lo=j, hi=j)
            v, w = decompose(h, V)
            assert v + w == h
            assert V.contains(V.ambient.from_jet(v))
            for g in V.to_jets(3):
                assert inner_product(w, g) == 0
            # V^(j)(A) depends only on the (j-1)-jet
            A2 = A + random_jet(rng, m, n, 2, 3, lo=j)
            assert v_space(A2, kind, j).generators == V.generators


@pytest.mark.parametrize("kind", KINDS)
def test_v_space_matches_brute_force(kind):
    rng = random.Random(31)
    for m, n, p, j in itertools.product((1, 2), (1, 2), (1, 2), (1, 2)):
        if kind.square_only and m != n:
            continue
        A = random_jet(rng, m, n, p, j, density=0.5, bound=2)
        V = v_space(A, kind, j)
        theirs, labels = brute_v_space(A, kind, j)
        # put the oracle's columns into our ambient order
        amb = V.ambient
        assert sorted(labels) == sorted(amb.elements)
        perm = [labels.index(e) for e in amb.elements]
        theirs = theirs[:, perm] if theirs.rows else sp.zeros(0, amb.dim)
        ours_rows = [[sp.Rational(int(g.get(k, 0).numerator), int(g.get(k, 0).denominator)) if g.get(k) else 0
                      for k in range(V.ambient.dim)] for g in V.generators]
        M1 = sp.Matrix(ours_rows) if ours_rows else sp.zeros(0, V.ambient.dim)
        r1, r2 = (M1.rank() if M1.rows else 0), (theirs.rank() if theirs.rows else 0)
        both = sp.Matrix.vstack(M1, theirs)
        assert r1 == r2 == (both.rank() if both.rows else 0)
        W = w_complement(V)
        assert V.dim + W.dim == m * n * math.comb(j + p - 1, p - 1)


def test_guardrail(monkeypatch):
    A = MatrixJet.zeros(3, 3, 2, 3)
    with pytest.raises(GuardrailError):
        assemble_action(A, GroupKind.TWO_SIDED, 3, max_columns=10)
    monkeypatch.setenv("JETNORM_MAX_COLUMNS", "5")
    with pytest.raises(GuardrailError):
        v_space(A, GroupKind.TWO_SIDED, 1)


def test_labels_and_dump():
    V = v_space(P("[x]"), GroupKind.TWO_SIDED, 2)
    assert "x1^2*E[1,1]" in V.dump()
    L = assemble_action(P("[x]"), GroupKind.TWO_SIDED, 1)
    assert L.domain.label(0) == "l:x1*E[1,1]"
    assert "r:x1*E[1,1]" in L.dump()
