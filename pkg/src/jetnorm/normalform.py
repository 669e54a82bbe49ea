"""Jet-by-jet normal forms, their verification, and determinacy tests."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import DegreeRangeError, InvalidInputError, ShapeError
from .gradedlin import GradedBasis, assemble_action, decompose, preimage_nu, v_space
from .groups import GroupElementJet, GroupKind, act, compose, exp_lie, invert_jet
from .jets import MatrixJet, SeriesJet, apply_diff_op, constant_part, inner_product, monomial_key, monomials
from .linalg import Echelon, dense_det, dense_inverse, nullspace

log = logging.getLogger(__name__)

__all__ = [
    "CertificateCheck",
    "DegreeStep",
    "DegreeVerdict",
    "DeterminacyReport",
    "NormalFormResult",
    "OneVariableForm",
    "PDEReport",
    "RelationCheck",
    "check_pde",
    "constant_preprocess",
    "determinacy_report",
    "jet_equivalence",
    "normal_form",
    "one_variable_nf",
    "verify_certificate",
]


@dataclass(frozen=True)
class DegreeStep:
    j: int
    dim_v: int
    dim_w: int
    residual_norm2: object


@dataclass(frozen=True)
class NormalFormResult:
    A: MatrixJet
    kind: GroupKind
    B: MatrixJet
    certificate: GroupElementJet
    log: tuple
    warnings: tuple = ()


def _scalar_constant(A: MatrixJet):
    """lambda if the constant term is lambda*1, else None."""
    A0 = constant_part(A)
    lam = A0[0][0] if A0 else mpq(0)
    for i, row in enumerate(A0):
        for k, c in enumerate(row):
            if c != (lam if i == k else 0):
                return None
    return lam


def normal_form(A: MatrixJet, kind: GroupKind, *, max_columns: int | None = None) -> NormalFormResult:
    """Reduce A degree by degree; the degree-0 term is never touched."""
    kind.check_shape(A.rows, A.cols)
    N = A.trunc_order
    if N < 1:
        raise DegreeRangeError("normal forms need truncation order >= 1")
    warnings = []
    if kind is GroupKind.CONJUGACY and _scalar_constant(A) is None:
        warnings.append("constant term is not a scalar matrix; the conjugacy PDE relations do not apply")
    B = A
    g = GroupElementJet.identity(kind, A.rows, A.cols, A.p, N)
    steps = []
    for j in range(1, N + 1):
        V = v_space(B, kind, j, max_columns=max_columns)
        v, w = decompose(B.homogeneous(j), V)
        res = inner_product(v, v)
        if res:
            nu = preimage_nu(v, V)
            step = exp_lie(-nu)
            B = act(step, B)
            g = compose(step, g)
            if B.homogeneous(j) != w:
                raise AssertionError(f"degree {j} update did not land on the complement")
        steps.append(DegreeStep(j, V.dim, V.ambient.dim - V.dim, res))
        log.debug("degree %d: dim V=%d residual=%s", j, V.dim, res)
    return NormalFormResult(A, kind, B, g, tuple(steps), tuple(warnings))


# --------------------------------------------------------------------------
# certificate check


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    problems: tuple = ()

    def __bool__(self):
        return self.ok


def first_difference(X: MatrixJet, Y: MatrixJet):
    """(row, col, exponents, X coeff, Y coeff) of the first disagreement, or None."""
    best = None
    for r in range(X.rows):
        for c in range(X.cols):
            a, b = X.entries[r][c].terms, Y.entries[r][c].terms
            for e in set(a) | set(b):
                if a.get(e, 0) != b.get(e, 0):
                    key = (monomial_key(e), r, c)
                    if best is None or key < best[0]:
                        best = (key, (r, c, e, a.get(e, mpq(0)), b.get(e, mpq(0))))
    return None if best is None else best[1]


def verify_certificate(r: NormalFormResult) -> CertificateCheck:
    problems = []
    g = r.certificate
    if g.kind is not r.kind:
        problems.append(f"certificate kind {g.kind.value} differs from {r.kind.value}")
    if not g.is_unipotent:
        problems.append("certificate is not unipotent")
    try:
        GroupElementJet(g.U, g.V, r.kind)
    except InvalidInputError as exc:
        problems.append(f"certificate violates the group constraints: {exc}")
    try:
        image = act(g, r.A)
    except InvalidInputError as exc:
        problems.append(f"cannot apply certificate: {exc}")
    else:
        diff = first_difference(image, r.B)
        if diff is not None:
            i, k, e, got, want = diff
            problems.append(f"g.A differs from B at entry ({i + 1},{k + 1}), monomial {e}: {got} != {want}")
    return CertificateCheck(not problems, tuple(problems))


# --------------------------------------------------------------------------
# differential relations


@dataclass(frozen=True)
class RelationCheck:
    name: str
    passed: bool
    first_nonzero: tuple | None = None


@dataclass(frozen=True)
class PDEReport:
    kind: GroupKind
    k: int
    relations: tuple

    @property
    def passed(self) -> bool:
        return all(rel.passed for rel in self.relations)


def _relation(name: str, M: MatrixJet) -> RelationCheck:
    if M.is_zero():
        return RelationCheck(name, True)
    diff = first_difference(M, MatrixJet.zeros(M.rows, M.cols, M.p, M.trunc_order))
    r, c, e, val, _ = diff
    return RelationCheck(name, False, (r, c, e, val))


def check_pde(B: MatrixJet, k: int, kind: GroupKind) -> PDEReport:
    """Evaluate the kind's differential relations on b = B - pi_k B with A_k = B^(k)."""
    kind.check_shape(B.rows, B.cols)
    if k < 0 or k > B.trunc_order:
        raise DegreeRangeError(f"k={k} outside 0..{B.trunc_order}")
    Bs = B
    if kind is GroupKind.CONJUGACY:
        lam = _scalar_constant(B)
        if lam is None:
            raise InvalidInputError("conjugacy relations need a scalar constant term lambda*1")
        Bs = B - MatrixJet.identity(B.rows, B.p, B.trunc_order).scale(lam)
    Ak = Bs.homogeneous(k)
    b = Bs - Bs.project(k)
    rels = []
    if kind in (GroupKind.LEFT, GroupKind.TWO_SIDED):
        # reported transposed back so positions refer to entries of b
        rels.append(_relation("left", apply_diff_op(Ak.transpose(), b.transpose()).transpose()))
    if kind in (GroupKind.RIGHT, GroupKind.TWO_SIDED):
        rels.append(_relation("right", apply_diff_op(Ak, b)))
    if kind is GroupKind.CONGRUENCE:
        rels.append(_relation("congruence", apply_diff_op(Ak.transpose(), b.transpose()) + apply_diff_op(Ak, b)))
    if kind is GroupKind.CONJUGACY:
        rels.append(_relation("conjugacy",
                              apply_diff_op(Ak.transpose(), b.transpose()).transpose() - apply_diff_op(Ak, b)))
    return PDEReport(kind, k, tuple(rels))


# --------------------------------------------------------------------------
# finite determinacy


@dataclass(frozen=True)
class DegreeVerdict:
    j: int
    contained: bool
    missing_dim: int
    trace_obstruction: bool = False


@dataclass(frozen=True)
class DeterminacyReport:
    kind: GroupKind
    k: int
    j_max: int
    verdicts: tuple

    @property
    def first_failure(self) -> int | None:
        return next((v.j for v in self.verdicts if not v.contained), None)

    @property
    def all_pass(self) -> bool:
        return all(v.contained for v in self.verdicts)

    def summary(self) -> str:
        if not self.verdicts:
            return "no degrees checked"
        if self.all_pass:
            return (f"image contains every homogeneous degree {self.k + 1}..{self.j_max}: evidence of "
                    f"{self.k}-determinacy up to degree {self.j_max} (the criterion needs all degrees, "
                    f"so this is not a proof)")
        j = self.first_failure
        return f"image misses part of degree {j}: the matrix is not {j - 1}-determined for the unipotent group"


def determinacy_report(A: MatrixJet, kind: GroupKind, k: int, j_max: int, *,
                       max_columns: int | None = None) -> DeterminacyReport:
    kind.check_shape(A.rows, A.cols)
    if j_max > A.trunc_order:
        raise DegreeRangeError(f"j_max={j_max} exceeds truncation order {A.trunc_order}")
    if k < 0:
        raise DegreeRangeError("k must be nonnegative")
    verdicts = []
    for j in range(k + 1, j_max + 1):
        L = assemble_action(A, kind, j, max_columns=max_columns)
        ech = Echelon()
        for col in L.columns:
            ech.add(col)
        base = ech.rank
        top = [i for i, e in enumerate(L.codomain.elements) if sum(e[0]) == j]
        full = Echelon()
        full.pivots = dict(ech.pivots)
        for i in top:
            full.add({i: mpq(1)})
        missing = full.rank - base
        trace_obs = False
        if A.rows == A.cols:
            for I in monomials(A.p, j):
                tr = {L.codomain.index[(I, i, i)]: mpq(1) for i in range(A.rows)}
                if not ech.contains(tr):
                    trace_obs = True
                    break
        verdicts.append(DegreeVerdict(j, missing == 0, missing, trace_obs))
    return DeterminacyReport(kind, k, j_max, tuple(verdicts))


# --------------------------------------------------------------------------
# jet equivalence


def jet_equivalence(A: MatrixJet, B: MatrixJet, kind: GroupKind, j: int, *, seed: int = 0,
                    attempts: int = 64) -> GroupElementJet | None:
    """Find g with pi_j(g.A) = pi_j(B) by solving pi_j(U A - B V) = 0, or None."""
    if kind is GroupKind.CONGRUENCE:
        raise InvalidInputError("jet_equivalence does not support congruence: U A U^T = B is not linear in U")
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    kind.check_shape(A.rows, A.cols)
    if j < 0 or j > A.trunc_order or j > B.trunc_order:
        raise DegreeRangeError(f"j={j} outside the truncation range")
    m, n, p, N = A.rows, A.cols, A.p, A.trunc_order
    codomain = GradedBasis.matrix_space(m, n, p, 0, j)
    cidx = codomain.index
    Aj = A.project(j).term_dicts()
    Bj = B.project(j).term_dicts()
    monos = [I for d in range(j + 1) for I in monomials(p, d)]

    def left_mult(I, a, b):
        # x^I E_ab A: row a gets x^I * row b of A
        out = {}
        for c in range(n):
            for K, v in Aj[b][c].items():
                if sum(K) + sum(I) <= j:
                    _acc_vec(out, cidx[(tuple(x + y for x, y in zip(I, K)), a, c)], v)
        return out

    def right_mult(I, a, b):
        # -B x^I E_ab: column b gets -x^I * column a of B
        out = {}
        for r in range(m):
            for K, v in Bj[r][a].items():
                if sum(K) + sum(I) <= j:
                    _acc_vec(out, cidx[(tuple(x + y for x, y in zip(I, K)), r, b)], -v)
        return out

    unknowns = []  # (label, column)
    if kind in (GroupKind.LEFT, GroupKind.TWO_SIDED):
        unknowns += [(("U", I, a, b), left_mult(I, a, b)) for I in monos for a in range(m) for b in range(m)]
    if kind is GroupKind.RIGHT:
        col = {}
        for r in range(m):
            for c in range(n):
                for K, v in Aj[r][c].items():
                    _acc_vec(col, cidx[(K, r, c)], v)
        unknowns.append((("s",), col))
    if kind in (GroupKind.RIGHT, GroupKind.TWO_SIDED):
        unknowns += [(("V", I, a, b), right_mult(I, a, b)) for I in monos for a in range(n) for b in range(n)]
    if kind is GroupKind.LEFT:
        col = {}
        for r in range(m):
            for c in range(n):
                for K, v in Bj[r][c].items():
                    _acc_vec(col, cidx[(K, r, c)], -v)
        unknowns.append((("t",), col))
    if kind is GroupKind.CONJUGACY:
        for I in monos:
            for a in range(m):
                for b in range(m):
                    col = left_mult(I, a, b)
                    for key, v in right_mult(I, a, b).items():
                        _acc_vec(col, key, v)
                    unknowns.append((("W", I, a, b), col))

    rows = [dict() for _ in range(codomain.dim)]
    for u, (_, col) in enumerate(unknowns):
        for key, v in col.items():
            rows[key][u] = v
    basis = nullspace([r for r in rows if r], range(len(unknowns)))
    if not basis:
        return None
    rng = random.Random(seed)
    for attempt in range(attempts):
        if attempt == 0:
            coeffs = [mpq(1)] * len(basis)
        else:
            coeffs = [mpq(rng.randint(-5, 5)) for _ in basis]
        sol: dict = {}
        for c, vec in zip(coeffs, basis):
            for key, v in vec.items():
                _acc_vec(sol, key, c * v)
        g = _build_witness(sol, unknowns, kind, m, n, p, N)
        if g is not None:
            return g
    return None


def _acc_vec(d: dict, key, v) -> None:
    w = d.get(key)
    if w is None:
        if v:
            d[key] = v
    else:
        w = w + v
        if w:
            d[key] = w
        else:
            del d[key]


def _build_witness(sol, unknowns, kind, m, n, p, N):
    Ug = [[{} for _ in range(m)] for _ in range(m)]
    Vg = [[{} for _ in range(n)] for _ in range(n)]
    scale_t = scale_s = mpq(0)
    for u, c in sol.items():
        label = unknowns[u][0]
        if label[0] in ("U", "W"):
            _, I, a, b = label
            Ug[a][b][I] = c
        if label[0] in ("V", "W"):
            _, I, a, b = label
            Vg[a][b][I] = c
        if label[0] == "t":
            scale_t = c
        if label[0] == "s":
            scale_s = c
    U = MatrixJet._from_dicts(Ug, p, N, (m, m))
    V = MatrixJet._from_dicts(Vg, p, N, (n, n))
    if kind is GroupKind.LEFT:
        if not scale_t:
            return None
        U = U.scale(1 / scale_t)
        V = MatrixJet.identity(n, p, N)
    if kind is GroupKind.RIGHT:
        if not scale_s:
            return None
        V = V.scale(1 / scale_s)
        U = MatrixJet.identity(m, p, N)
    if not dense_det(constant_part(U)) or not dense_det(constant_part(V)):
        return None
    return GroupElementJet(U, V, kind)


# --------------------------------------------------------------------------
# constant preprocessing (full group, opt-in)


def _row_reducer(M):
    """P with P M in reduced row echelon form (Gauss-Jordan on [M | 1])."""
    m = len(M)
    n = len(M[0]) if M else 0
    W = [list(M[i]) + [mpq(1) if k == i else mpq(0) for k in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if W[i][c]), None)
        if piv is None:
            continue
        W[r], W[piv] = W[piv], W[r]
        inv = 1 / W[r][c]
        W[r] = [v * inv for v in W[r]]
        for i in range(m):
            if i != r and W[i][c]:
                f = W[i][c]
                W[i] = [a - f * b for a, b in zip(W[i], W[r])]
        r += 1
    return [row[n:] for row in W]


def _transpose(M):
    return [list(col) for col in zip(*M)] if M else []


def constant_preprocess(A: MatrixJet, kind: GroupKind):
    """Constant g0 bringing A_0 to echelon/rank normal form; returns (g0, g0.A).

    Only left, right and two-sided kinds are supported. The result is not
    unipotent, so composing it with the canonical pass gives a normal form
    but not a G^0-canonical one.
    """
    if kind not in (GroupKind.LEFT, GroupKind.RIGHT, GroupKind.TWO_SIDED):
        raise InvalidInputError("full-group preprocessing supports left, right and two-sided only")
    A0 = constant_part(A)
    p, N, m, n = A.p, A.trunc_order, A.rows, A.cols
    P = [[mpq(1) if i == k else mpq(0) for k in range(m)] for i in range(m)]
    Qinv = [[mpq(1) if i == k else mpq(0) for k in range(n)] for i in range(n)]
    if kind in (GroupKind.LEFT, GroupKind.TWO_SIDED):
        P = _row_reducer(A0)
    if kind in (GroupKind.RIGHT, GroupKind.TWO_SIDED):
        R = [[sum((P[i][l] * A0[l][k] for l in range(m)), mpq(0)) for k in range(n)] for i in range(m)]
        QT = _row_reducer(_transpose(R))
        Qinv = dense_inverse(_transpose(QT))
    g0 = GroupElementJet(MatrixJet.from_constant(P, p, N), MatrixJet.from_constant(Qinv, p, N), kind)
    return g0, act(g0, A)


# --------------------------------------------------------------------------
# one variable


@dataclass(frozen=True)
class OneVariableForm:
    B: MatrixJet
    U: MatrixJet
    V: MatrixJet
    exponents: tuple  # diagonal exponents, None for entries zero at this truncation

    def __iter__(self):
        return iter((self.B, self.U, self.V))


def _shift_down(s: SeriesJet, v: int, N: int) -> SeriesJet:
    """s / x^v read as a polynomial of degree <= N - v, embedded at truncation N."""
    return SeriesJet(1, N, {(e[0] - v,): c for e, c in s.terms.items() if e[0] - v <= N - v})


def _inverse_series(u: SeriesJet, prec: int, N: int) -> SeriesJet:
    w = invert_jet(MatrixJet([[u.retruncate(prec)]], 1, prec))[0, 0]
    return w.retruncate(N)


def one_variable_nf(A: MatrixJet) -> OneVariableForm:
    """Two-sided diagonal form x^k1 1 + ... over K[[x]] by valuation pivoting."""
    if A.p != 1:
        raise ShapeError("one_variable_nf needs exactly one variable")
    m, n, N = A.rows, A.cols, A.trunc_order
    M = [list(row) for row in A.entries]
    one, zero = SeriesJet.constant(1, 1, N), SeriesJet(1, N)
    U = [[one if i == k else zero for k in range(m)] for i in range(m)]
    C = [[one if i == k else zero for k in range(n)] for i in range(n)]  # accumulates V^-1
    exps = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for k in range(t, n):
                val = M[i][k].valuation()
                if val != float("inf") and (best is None or val < best[0]):
                    best = (val, i, k)
        if best is None:
            break
        v, i, k = best
        M[t], M[i] = M[i], M[t]
        U[t], U[i] = U[i], U[t]
        for row in M:
            row[t], row[k] = row[k], row[t]
        for row in C:
            row[t], row[k] = row[k], row[t]
        uinv = _inverse_series(_shift_down(M[t][t], v, N), N - v, N)
        M[t] = [s * uinv for s in M[t]]
        U[t] = [s * uinv for s in U[t]]
        for i2 in range(t + 1, m):
            if M[i2][t].is_zero():
                continue
            c = _shift_down(M[i2][t], v, N)
            M[i2] = [a - c * b for a, b in zip(M[i2], M[t])]
            U[i2] = [a - c * b for a, b in zip(U[i2], U[t])]
        for k2 in range(t + 1, n):
            if M[t][k2].is_zero():
                continue
            c = _shift_down(M[t][k2], v, N)
            for row in M:
                row[k2] = row[k2] - c * row[t]
            for row in C:
                row[k2] = row[k2] - c * row[t]
        exps.append(v)
    exps += [None] * (min(m, n) - len(exps))
    B = MatrixJet(M, 1, N, (m, n))
    Umat = MatrixJet(U, 1, N, (m, m))
    Vmat = invert_jet(MatrixJet(C, 1, N, (n, n)))
    return OneVariableForm(B, Umat, Vmat, tuple(exps))
