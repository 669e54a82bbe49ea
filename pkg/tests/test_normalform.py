import random

import pytest
from gmpy2 import mpq

from jetnorm.errors import DegreeRangeError, InvalidInputError, ShapeError
from jetnorm.gradedlin import v_space
from jetnorm.groups import GroupElementJet, GroupKind, act
from jetnorm.jets import MatrixJet, inner_product
from jetnorm.normalform import (NormalFormResult, check_pde, constant_preprocess, determinacy_report,
                                jet_equivalence, normal_form, one_variable_nf, verify_certificate)
from jetnorm.parser import parse_poly_matrix
from jetnorm.sampling import random_jet, random_unipotent

KINDS = list(GroupKind)


def P(text, names="x,y", N=4):
    return parse_poly_matrix(text, names.split(","), N)


def shape_for(rng, kind):
    m = rng.randint(1, 3)
    return m, (m if kind.square_only else rng.randint(1, 3))


# -- normal_form ------------------------------------------------------------


@pytest.mark.parametrize("kind", [GroupKind.LEFT, GroupKind.RIGHT, GroupKind.TWO_SIDED])
def test_invertible_constant_gives_identity(kind):
    A = P("[1 + x + y^2, x*y; x^3, 1 - y]")
    assert normal_form(A, kind).B == MatrixJet.identity(2, 2, 4)


def test_identity_constant_conjugacy_keeps_trace_part():
    # conjugation cannot remove central terms: a 1x1 jet is its own normal form
    A = P("[1 + x + y^2]")
    assert normal_form(A, GroupKind.CONJUGACY).B == A


@pytest.mark.parametrize("text", ["[x + x^2, 0; 0, y]", "[x, y^2; 0, y]"])
def test_two_sided_examples(text):
    r = normal_form(P(text), GroupKind.TWO_SIDED)
    assert r.B == P("[x, 0; 0, y]")
    assert verify_certificate(r)


def test_certificate_tamper_detection():
    r = normal_form(P("[x + x^2, 0; 0, y]"), GroupKind.TWO_SIDED)
    bad = NormalFormResult(r.A, r.kind, r.B + P("[0, 0; 0, y^4]"), r.certificate, r.log)
    check = verify_certificate(bad)
    assert not check and "(2,2)" in check.problems[0]
    ident = GroupElementJet.identity(GroupKind.TWO_SIDED, 2, 2, 2, 4)
    assert not verify_certificate(NormalFormResult(r.A, r.kind, r.B, ident, r.log))


@pytest.mark.parametrize("kind", KINDS)
def test_normal_form_properties(kind):
    rng = random.Random(101)
    for _ in range(4):
        m, n = shape_for(rng, kind)
        p, N = rng.randint(1, 2), rng.randint(2, 4)
        A = random_jet(rng, m, n, p, N, density=0.4)
        r = normal_form(A, kind)
        assert verify_certificate(r)
        assert r.B.project(0) == A.project(0)
        assert normal_form(r.B, kind).B == r.B
        for j in range(1, N + 1):
            V = v_space(r.B, kind, j)
            h = r.B.homogeneous(j)
            for g in V.to_jets(N):
                assert inner_product(h, g) == 0


@pytest.mark.parametrize("kind", KINDS)
def test_g0_canonicity(kind):
    rng = random.Random(202)
    for _ in range(4):
        m, n = shape_for(rng, kind)
        p, N = rng.randint(1, 2), rng.randint(2, 4)
        B = normal_form(random_jet(rng, m, n, p, N, density=0.4), kind).B
        g = random_unipotent(rng, kind, m, n, p, N)
        assert normal_form(act(g, B), kind).B == B


def test_conjugacy_nonscalar_warning():
    r = normal_form(P("[1, x; 0, 2]"), GroupKind.CONJUGACY)
    assert r.warnings


def test_normal_form_errors():
    with pytest.raises(ShapeError):
        normal_form(P("[x, y]"), GroupKind.CONJUGACY)
    with pytest.raises(DegreeRangeError):
        normal_form(P("[1]", N=0), GroupKind.LEFT)


# -- check_pde --------------------------------------------------------------


def test_check_pde_examples():
    assert check_pde(P("[x, 0; 0, y]"), 1, GroupKind.TWO_SIDED).passed
    rep = check_pde(P("[x, y^2; 0, y]"), 1, GroupKind.TWO_SIDED)
    assert not rep.passed
    failing = [rel for rel in rep.relations if not rel.passed]
    r, c, e, val = failing[0].first_nonzero
    assert (r, c) == (0, 1) and e == (0, 1) and val == 2
    jordan = P("[x + y^2, y; -2*x*y, x + y^2]")
    assert check_pde(jordan, 1, GroupKind.TWO_SIDED).passed
    jordan_bad = P("[x + y^2, y; 2*x*y, x + y^2]")
    assert not check_pde(jordan_bad, 1, GroupKind.TWO_SIDED).passed


def test_check_pde_kinds():
    B = P("[x, x^2; y^2, y]")
    assert {rel.name for rel in check_pde(B, 1, GroupKind.LEFT).relations} == {"left"}
    assert {rel.name for rel in check_pde(B, 1, GroupKind.CONGRUENCE).relations} == {"congruence"}
    with pytest.raises(InvalidInputError):
        check_pde(P("[1, x; 0, 2]"), 0, GroupKind.CONJUGACY)
    with pytest.raises(DegreeRangeError):
        check_pde(B, 9, GroupKind.LEFT)


@pytest.mark.parametrize("kind", KINDS)
def test_pde_holds_on_normal_forms(kind):
    rng = random.Random(303)
    for _ in range(4):
        m, n = shape_for(rng, kind)
        k = rng.randint(1, 2)
        lead = random_jet(rng, m, n, 2, k + 2, lo=k, hi=k, density=0.7)
        if lead.is_zero():
            continue
        A = lead + random_jet(rng, m, n, 2, k + 2, lo=k + 1, density=0.5)
        if kind is GroupKind.CONJUGACY:
            A = A + MatrixJet.identity(m, 2, k + 2).scale(mpq(3))
        B = normal_form(A, kind).B
        assert check_pde(B, k, kind).passed


# -- determinacy ------------------------------------------------------------


def test_determinacy_examples():
    I2 = P("[1, 0; 0, 1]", "x")
    rep = determinacy_report(I2, GroupKind.TWO_SIDED, 0, 4)
    assert rep.all_pass and "not a proof" in rep.summary()
    rep = determinacy_report(I2, GroupKind.CONJUGACY, 0, 4)
    assert rep.first_failure == 1
    assert all(not v.contained and v.trace_obstruction for v in rep.verdicts)
    rep = determinacy_report(P("[1, 1; 1, 1]", "x"), GroupKind.LEFT, 0, 2)
    assert rep.first_failure == 1
    for kind in KINDS:
        rep = determinacy_report(MatrixJet.zeros(2, 2, 1, 3), kind, 0, 3)
        assert all(not v.contained for v in rep.verdicts)


# -- jet_equivalence ----------------------------------------------------------


def test_jet_equivalence_examples():
    A = P("[x, y^2; 0, y]", N=3)
    assert jet_equivalence(A, A, GroupKind.TWO_SIDED, 3) is not None
    g = jet_equivalence(A, P("[x, 0; 0, y]", N=3), GroupKind.TWO_SIDED, 3)
    assert g is not None and act(g, A) == P("[x, 0; 0, y]", N=3)
    assert jet_equivalence(P("[x]", "x"), P("[x^2]", "x"), GroupKind.TWO_SIDED, 4) is None
    with pytest.raises(InvalidInputError):
        jet_equivalence(A, A, GroupKind.CONGRUENCE, 2)


@pytest.mark.parametrize("kind", [GroupKind.LEFT, GroupKind.RIGHT, GroupKind.TWO_SIDED, GroupKind.CONJUGACY])
def test_jet_equivalence_random_orbits(kind):
    rng = random.Random(404)
    for _ in range(3):
        m, n = shape_for(rng, kind)
        A = random_jet(rng, m, n, 2, 3, density=0.5)
        g = random_unipotent(rng, kind, m, n, 2, 3)
        B = act(g, A)
        w = jet_equivalence(A, B, kind, 3)
        assert w is not None and act(w, A) == B
        if w.is_unipotent:
            assert normal_form(A, kind).B == normal_form(B, kind).B


# -- constant preprocessing and one variable ----------------------------------


@pytest.mark.parametrize("kind", [GroupKind.LEFT, GroupKind.RIGHT, GroupKind.TWO_SIDED])
def test_constant_preprocess(kind):
    A = P("[2 + x, 4; 1, 2 + y]")
    g0, A1 = constant_preprocess(A, kind)
    assert act(g0, A) == A1
    if kind is GroupKind.TWO_SIDED:
        assert A1.project(0) == P("[1, 0; 0, 0]")
    with pytest.raises(InvalidInputError):
        constant_preprocess(A, GroupKind.CONJUGACY)


def test_one_variable_examples():
    B, U, V = one_variable_nf(P("[x^2, 0; 0, x]", "x", 5))
    assert B == P("[x, 0; 0, x^2]", "x", 5)
    B, U, V = one_variable_nf(P("[x, x; x, x]", "x", 5))
    assert B == P("[x, 0; 0, 0]", "x", 5)
    A = MatrixJet.zeros(2, 3, 1, 4)
    res = one_variable_nf(A)
    assert res.B == A and res.exponents == (None, None)


def test_one_variable_witness_and_shape():
    rng = random.Random(505)
    for _ in range(10):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        A = random_jet(rng, m, n, 1, 5, density=0.4)
        res = one_variable_nf(A)
        assert act(GroupElementJet(res.U, res.V, GroupKind.TWO_SIDED), A) == res.B
        exps = [e for e in res.exponents if e is not None]
        assert exps == sorted(exps)
    with pytest.raises(ShapeError):
        one_variable_nf(P("[x]"))
