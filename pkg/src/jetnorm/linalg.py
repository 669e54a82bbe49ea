"""Exact sparse linear algebra over Q and Q(i).

Vectors are dicts ``{index: scalar}`` with no stored zeros. Indices are
integers and the pivot of a vector is its smallest index.
"""

from __future__ import annotations

import flint
from gmpy2 import mpq

from .errors import SingularConstantTermError
from .scalars import GaussianRational, conj


def axpy(y: dict, a, x: dict) -> None:
    """y += a * x, in place, dropping cancellations."""
    for k, v in x.items():
        w = y.get(k)
        if w is None:
            y[k] = a * v
        else:
            w = w + a * v
            if w:
                y[k] = w
            else:
                del y[k]


def scaled(x: dict, a) -> dict:
    return {k: v * a for k, v in x.items()}


def dot(x: dict, y: dict, weights=None):
    """Sum x_k conj(y_k) w_k."""
    if len(y) < len(x):
        small, big, flip = y, x, True
    else:
        small, big, flip = x, y, False
    total = mpq(0)
    for k, v in small.items():
        u = big.get(k)
        if u is None:
            continue
        a, b = (u, v) if flip else (v, u)
        term = a * conj(b)
        if weights is not None:
            term = term * weights[k]
        total = total + term
    return total


class Echelon:
    """Incrementally maintained echelon basis with optional tag tracking.

    Each stored vector has a distinct pivot (its smallest index) with value 1.
    A tag is a sparse vector carried through the same row operations, used to
    remember which combination of inputs produced a basis vector.
    """

    def __init__(self):
        self.pivots: dict = {}

    def reduce(self, vec: dict, tag: dict | None = None):
        vec = dict(vec)
        tag = dict(tag) if tag is not None else None
        done = []
        while vec:
            lead = min(vec)
            row = self.pivots.get(lead)
            if row is None:
                # keep the leading entry and continue below it
                done.append((lead, vec.pop(lead)))
                continue
            c = vec[lead]
            axpy(vec, -c, row[0])
            if tag is not None and row[1] is not None:
                axpy(tag, -c, row[1])
        out = dict(done)
        return out, tag

    def add(self, vec: dict, tag: dict | None = None):
        """Reduce and insert; returns the pivot index or None if dependent."""
        red, tag = self.reduce(vec, tag)
        if not red:
            return None
        lead = min(red)
        inv = 1 / red[lead]
        red = scaled(red, inv)
        if tag is not None:
            tag = scaled(tag, inv)
        self.pivots[lead] = (red, tag)
        return lead

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduced_basis(self):
        """Fully reduced row echelon form as (pivots, vectors, tags), pivot-sorted."""
        keys = sorted(self.pivots)
        rows = {k: (dict(self.pivots[k][0]), None if self.pivots[k][1] is None else dict(self.pivots[k][1]))
                for k in keys}
        for k in reversed(keys):
            vk, tk = rows[k]
            for k2 in keys:
                if k2 >= k:
                    break
                v2, t2 = rows[k2]
                c = v2.get(k)
                if c:
                    axpy(v2, -c, vk)
                    if t2 is not None and tk is not None:
                        axpy(t2, -c, tk)
        return keys, [rows[k][0] for k in keys], [rows[k][1] for k in keys]


def rref(vectors, tags=None):
    """Reduced row echelon basis of the span of ``vectors``."""
    ech = Echelon()
    for i, v in enumerate(vectors):
        ech.add(v, None if tags is None else tags[i])
    return ech.reduced_basis()


def nullspace(rows, columns) -> list[dict]:
    """Basis (in reduced echelon form) of {c : row . c = 0 for every row}.

    ``rows`` are sparse dicts over the ordered index list ``columns``.
    """
    piv, basis, _ = rref(rows)
    pivset = set(piv)
    out = []
    for f in columns:
        if f in pivset:
            continue
        v = {f: mpq(1)}
        for p, row in zip(piv, basis):
            c = row.get(f)
            if c:
                v[p] = -c
        out.append(v)
    # free-variable vectors come out in echelon order from the largest index
    _, red, _ = rref(out)
    return red


def solve(rows, rhs):
    """One solution c of row_i . c = rhs_i for all i, or None if inconsistent."""
    ech = Echelon()
    for i, (row, b) in enumerate(zip(rows, rhs)):
        red, tag = ech.reduce(row, {-1: b} if b else {})
        if not red:
            if tag:
                return None
            continue
        lead = min(red)
        inv = 1 / red[lead]
        ech.pivots[lead] = (scaled(red, inv), scaled(tag, inv))
    keys, basis, tags = ech.reduced_basis()
    sol = {}
    for k, tag in zip(keys, tags):
        b = tag.get(-1)
        if b:
            sol[k] = b
    return sol


def _to_fmpq(q) -> flint.fmpq:
    q = mpq(q)
    return flint.fmpq(int(q.numerator), int(q.denominator))


def _from_fmpq(q: flint.fmpq):
    return mpq(int(q.p), int(q.q))


def _min_norm_real(rows, ncols, rhs, weights):
    """Real case of :func:`min_norm_solution` on flint's dense rational matrices."""
    nrows = len(rows)
    C = flint.fmpq_mat(nrows, ncols)
    for i, row in enumerate(rows):
        for k, v in row.items():
            C[i, k] = _to_fmpq(v)
    R, rank = C.transpose().rref()
    if rank == 0:
        return {} if not any(rhs) else None
    # pivot columns of rref(C^T) name a maximal independent set of rows of C
    keep = []
    col = 0
    for i in range(rank):
        while R[i, col] == 0:
            col += 1
        keep.append(col)
        col += 1
    Cs = flint.fmpq_mat(rank, ncols)
    for a, i in enumerate(keep):
        for k, v in rows[i].items():
            Cs[a, k] = _to_fmpq(v)
    DCt = Cs.transpose()
    for k in range(ncols):
        w = _to_fmpq(1 / mpq(weights[k]))
        for a in range(rank):
            if DCt[k, a] != 0:
                DCt[k, a] = DCt[k, a] * w
    G = Cs * DCt
    t = flint.fmpq_mat(rank, 1, [_to_fmpq(rhs[i]) for i in keep])
    nu = DCt * G.solve(t)
    full_t = flint.fmpq_mat(nrows, 1, [_to_fmpq(b) for b in rhs])
    if C * nu != full_t:
        return None
    return {k: _from_fmpq(nu[k, 0]) for k in range(ncols) if nu[k, 0] != 0}


def min_norm_solution(rows, ncols: int, rhs, weights):
    """Solution c of row_i . c = rhs_i minimizing sum w_k |c_k|^2, or None.

    Gaussian systems are solved through the real form
    [[Re, -Im], [Im, Re]], which preserves the weighted norm.
    """
    gaussian = any(isinstance(v, GaussianRational) for row in rows for v in row.values()) or \
        any(isinstance(b, GaussianRational) for b in rhs)
    if not gaussian:
        return _min_norm_real(rows, ncols, rhs, weights)
    re_rows, re_rhs = [], []
    for row, b in zip(rows, rhs):
        top, bottom = {}, {}
        for k, v in row.items():
            a, c = GaussianRational._parts(v)
            if a:
                top[k] = a
                bottom[k + ncols] = a
            if c:
                top[k + ncols] = -c
                bottom[k] = c
        br, bi = GaussianRational._parts(b)
        re_rows += [top, bottom]
        re_rhs += [br, bi]
    sol = _min_norm_real(re_rows, 2 * ncols, re_rhs, list(weights) * 2)
    if sol is None:
        return None
    out = {}
    for k in range(ncols):
        a, c = sol.get(k, mpq(0)), sol.get(k + ncols, mpq(0))
        if a or c:
            out[k] = GaussianRational(a, c)
    return out


# --------------------------------------------------------------------------
# small dense helpers for constant matrices


def identity(n: int) -> list[list]:
    return [[mpq(1) if i == k else mpq(0) for k in range(n)] for i in range(n)]


def dense_mul(A, B):
    return [[sum((A[i][l] * B[l][k] for l in range(len(B))), mpq(0)) for k in range(len(B[0]))]
            for i in range(len(A))]


def dense_rank(A) -> int:
    return Echelon_from_dense(A).rank


def Echelon_from_dense(A) -> Echelon:
    ech = Echelon()
    for row in A:
        ech.add({k: c for k, c in enumerate(row) if c})
    return ech


def dense_inverse(A):
    n = len(A)
    if any(len(r) != n for r in A):
        raise SingularConstantTermError("matrix is not square")
    M = [list(A[i]) + [mpq(1) if k == i else mpq(0) for k in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            raise SingularConstantTermError("constant term is singular")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def dense_det(A):
    n = len(A)
    M = [list(r) for r in A]
    det = mpq(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det
