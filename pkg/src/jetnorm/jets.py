"""Truncated multivariate power series and matrices of them.

A jet of truncation order ``N`` in ``p`` variables stores the coefficients of
all monomials of total degree at most ``N``. Every jet is identified with its
polynomial representative, so differential operators applied to it are exact.

Monomials are exponent tuples. The global monomial order is graded: lower
total degree first, and within a degree ``x1`` outranks ``x2`` and so on
(``x1^2 < x1*x2 < x2^2`` in enumeration order).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import gmpy2
from gmpy2 import mpq

from .errors import DegreeRangeError, ShapeError, TruncationMismatchError
from .scalars import GaussianRational, conj, format_scalar

__all__ = [
    "MatrixJet",
    "SeriesJet",
    "apply_diff_op",
    "d_operator",
    "degree",
    "homogeneous",
    "inner_product",
    "mi_factorial",
    "monomial_key",
    "monomials",
    "monomials_upto",
    "mul",
    "project",
]


# --------------------------------------------------------------------------
# multi-indices


def degree(I: Sequence[int]) -> int:
    return sum(I)


@lru_cache(maxsize=None)
def mi_factorial(I: tuple) -> int:
    out = 1
    for e in I:
        out *= math.factorial(e)
    return out


def monomial_key(I: Sequence[int]):
    """Sort key realizing the global graded order."""
    return (sum(I), tuple(-e for e in I))


@lru_cache(maxsize=None)
def monomials(p: int, d: int) -> tuple:
    """All exponent tuples of total degree ``d`` in ``p`` variables, in order."""
    if d < 0:
        return ()
    if p == 0:
        return ((),) if d == 0 else ()
    if p == 1:
        return ((d,),)
    out = []
    for e in range(d, -1, -1):
        out.extend((e,) + rest for rest in monomials(p - 1, d - e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_upto(p: int, lo: int, hi: int) -> tuple:
    out = []
    for d in range(max(lo, 0), hi + 1):
        out.extend(monomials(p, d))
    return tuple(out)


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# coefficient-dict kernels (hot paths operate on plain dicts)


def _clean(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if c}


def _integral(d: dict):
    """(common denominator, {e: integer numerator}) for an all-rational dict, else None."""
    den = gmpy2.mpz(1)
    for c in d.values():
        if type(c) is not _MPQ:
            return None
        den = gmpy2.lcm(den, c.denominator)
    return den, {e: c.numerator * (den // c.denominator) for e, c in d.items()}


_MPQ = type(mpq(0))


def _mul_into(out: dict, a: dict, b: dict, N: int, sign=1) -> None:
    if not a or not b:
        return
    ia = _integral(a) if len(a) * len(b) > 4 else None
    ib = _integral(b) if ia is not None else None
    if ib is not None:
        # integer convolution, one rational normalization per output term
        (da, a), (db, b) = ia, ib
        acc: dict = {}
    else:
        acc = out
    bdeg = [(e, c, sum(e)) for e, c in b.items()]
    for ea, ca in a.items():
        room = N - sum(ea)
        if room < 0:
            continue
        if sign != 1:
            ca = -ca
        for eb, cb, db_ in bdeg:
            if db_ > room:
                continue
            e = _add_exps(ea, eb)
            v = acc.get(e)
            acc[e] = ca * cb if v is None else v + ca * cb
    if ib is not None:
        den = da * db
        for e, v in acc.items():
            q = mpq(v, den)
            w = out.get(e)
            out[e] = q if w is None else w + q


def _derivative(terms: dict, I: tuple) -> dict:
    out = {}
    for K, c in terms.items():
        factor = 1
        ok = True
        for k, i in zip(K, I):
            if k < i:
                ok = False
                break
            for t in range(k - i + 1, k + 1):
                factor *= t
        if ok:
            out[tuple(k - i for k, i in zip(K, I))] = c * factor
    return out


# --------------------------------------------------------------------------
# scalar series


class SeriesJet:
    """An element of K[[x_1..x_p]] known through total degree ``trunc_order``."""

    __slots__ = ("p", "trunc_order", "terms")

    def __init__(self, p: int, trunc_order: int, terms: Mapping | None = None):
        if trunc_order < 0:
            raise DegreeRangeError("truncation order must be nonnegative")
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != p or any(x < 0 for x in e):
                raise ShapeError(f"exponent {e} does not fit {p} variables")
            if sum(e) <= trunc_order and c:
                clean[e] = c if isinstance(c, GaussianRational) else mpq(c)
        self.p = p
        self.trunc_order = trunc_order
        self.terms = clean

    @classmethod
    def _raw(cls, p, N, terms):
        obj = cls.__new__(cls)
        obj.p = p
        obj.trunc_order = N
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, c, p, N):
        return cls(p, N, {(0,) * p: c})

    @classmethod
    def variable(cls, k, p, N):
        e = [0] * p
        e[k] = 1
        return cls(p, N, {tuple(e): 1})

    def _check(self, other):
        if self.p != other.p:
            raise ShapeError(f"variable count mismatch: {self.p} vs {other.p}")
        if self.trunc_order != other.trunc_order:
            raise TruncationMismatchError(
                f"truncation order mismatch: {self.trunc_order} vs {other.trunc_order}"
            )

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return SeriesJet._raw(self.p, self.trunc_order, _clean(out))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SeriesJet._raw(self.p, self.trunc_order, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, SeriesJet):
            self._check(other)
            out = {}
            _mul_into(out, self.terms, other.terms, self.trunc_order)
            return SeriesJet._raw(self.p, self.trunc_order, _clean(out))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        if not c:
            return SeriesJet._raw(self.p, self.trunc_order, {})
        return SeriesJet._raw(self.p, self.trunc_order, {e: v * c for e, v in self.terms.items()})

    def conjugate(self):
        return SeriesJet._raw(self.p, self.trunc_order, {e: conj(c) for e, c in self.terms.items()})

    def derivative(self, I: tuple) -> "SeriesJet":
        return SeriesJet._raw(self.p, self.trunc_order, _derivative(self.terms, tuple(I)))

    def project(self, j: int) -> "SeriesJet":
        return SeriesJet._raw(self.p, self.trunc_order, {e: c for e, c in self.terms.items() if sum(e) <= j})

    def homogeneous(self, j: int) -> "SeriesJet":
        return SeriesJet._raw(self.p, self.trunc_order, {e: c for e, c in self.terms.items() if sum(e) == j})

    def retruncate(self, N: int) -> "SeriesJet":
        return SeriesJet(self.p, N, self.terms)

    def coefficient(self, I) -> object:
        return self.terms.get(tuple(I), mpq(0))

    def valuation(self):
        """Lowest degree with a nonzero coefficient (``math.inf`` for zero)."""
        return min((sum(e) for e in self.terms), default=math.inf)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SeriesJet):
            return NotImplemented
        return (self.p, self.trunc_order, self.terms) == (other.p, other.trunc_order, other.terms)

    def __hash__(self):
        return hash((self.p, self.trunc_order, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0]))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        return format_series(self.terms, names or default_names(self.p))

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SeriesJet(p={self.p}, N={self.trunc_order}, {self.to_text()!r})"


def default_names(p: int) -> list[str]:
    return [f"x{k + 1}" for k in range(p)]


def _format_monomial(e, names) -> str:
    parts = []
    for k, x in enumerate(e):
        if x == 1:
            parts.append(names[k])
        elif x > 1:
            parts.append(f"{names[k]}^{x}")
    return "*".join(parts)


def _format_coeff(c) -> tuple[str, str]:
    """Return (sign, magnitude text) for a coefficient."""
    if isinstance(c, GaussianRational):
        if c.im == 0:
            c = c.re
        else:
            if c.re == 0:
                inner = f"{_q_text(c.im)}*i"
            else:
                sign = "-" if c.im < 0 else "+"
                inner = f"{_q_text(c.re)}{sign}{_q_text(abs(c.im))}*i"
            return "+", f"({inner})"
    c = mpq(c)
    return ("-" if c < 0 else "+"), _q_text(abs(c))


def _q_text(q) -> str:
    q = mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_series(terms: Mapping, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    pieces = []
    for e, c in sorted(terms.items(), key=lambda t: monomial_key(t[0])):
        sign, mag = _format_coeff(c)
        mono = _format_monomial(e, names)
        if not mono:
            body = mag
        elif mag == "1":
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not pieces:
            pieces.append(("-" if sign == "-" else "") + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


def series_to_json(s: SeriesJet) -> list:
    out = []
    for e, c in s.sorted_terms():
        if isinstance(c, GaussianRational):
            re_, im_ = c.re, c.im
        else:
            re_, im_ = c, mpq(0)
        out.append({"exps": list(e), "re": format_scalar(re_), "im": format_scalar(im_)})
    return out


def series_from_json(data: list, p: int, N: int, field=None) -> SeriesJet:
    terms = {}
    for t in data:
        re_, im_ = mpq(t["re"]), mpq(t.get("im", "0"))
        c = GaussianRational(re_, im_) if im_ != 0 or (field is not None and field.value == "gaussian") else re_
        terms[tuple(t["exps"])] = c
    return SeriesJet(p, N, terms)


# --------------------------------------------------------------------------
# matrices of series


class MatrixJet:
    """An m x n matrix of jets sharing ``p`` and ``trunc_order``.

    ``entries`` is a tuple of rows of :class:`SeriesJet`. The coefficient view
    ``coefficient(I)`` returns the constant matrix multiplying ``x^I``.
    """

    __slots__ = ("rows", "cols", "p", "trunc_order", "entries")

    def __init__(self, entries: Sequence[Sequence[SeriesJet]], p: int | None = None, trunc_order: int | None = None,
                 shape: tuple[int, int] | None = None):
        rows = tuple(tuple(r) for r in entries)
        if shape is None:
            if not rows or not rows[0]:
                raise ShapeError("empty matrix needs an explicit shape")
            shape = (len(rows), len(rows[0]))
        m, n = shape
        if len(rows) != m or any(len(r) != n for r in rows):
            raise ShapeError("ragged matrix")
        for r in rows:
            for s in r:
                if p is None:
                    p, trunc_order = s.p, s.trunc_order
                if s.p != p:
                    raise ShapeError("entries disagree on the number of variables")
                if s.trunc_order != trunc_order:
                    raise TruncationMismatchError("entries disagree on truncation order")
        if p is None or trunc_order is None:
            raise ShapeError("cannot infer p and truncation order")
        self.rows, self.cols = m, n
        self.p, self.trunc_order = p, trunc_order
        self.entries = rows

    # -- constructors -----------------------------------------------------

    @classmethod
    def _from_dicts(cls, grid, p, N, shape=None):
        obj = cls.__new__(cls)
        obj.rows = len(grid) if shape is None else shape[0]
        obj.cols = (len(grid[0]) if grid else 0) if shape is None else shape[1]
        obj.p, obj.trunc_order = p, N
        obj.entries = tuple(tuple(SeriesJet._raw(p, N, _clean(d)) for d in row) for row in grid)
        return obj

    @classmethod
    def zeros(cls, m: int, n: int, p: int, N: int) -> "MatrixJet":
        return cls._from_dicts([[{} for _ in range(n)] for _ in range(m)], p, N, (m, n))

    @classmethod
    def identity(cls, m: int, p: int, N: int) -> "MatrixJet":
        one = (0,) * p
        return cls._from_dicts([[{one: mpq(1)} if i == k else {} for k in range(m)] for i in range(m)], p, N, (m, m))

    @classmethod
    def from_constant(cls, matrix: Sequence[Sequence], p: int, N: int) -> "MatrixJet":
        one = (0,) * p
        grid = [[{one: c if isinstance(c, GaussianRational) else mpq(c)} for c in row] for row in matrix]
        return cls._from_dicts(grid, p, N, (len(matrix), len(matrix[0]) if matrix else 0))

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[tuple, Sequence[Sequence]], shape: tuple[int, int], p: int,
                          N: int) -> "MatrixJet":
        m, n = shape
        grid = [[{} for _ in range(n)] for _ in range(m)]
        for I, mat in coeffs.items():
            I = tuple(I)
            if len(I) != p:
                raise ShapeError(f"multi-index {I} does not fit {p} variables")
            if sum(I) > N:
                continue
            for i in range(m):
                for k in range(n):
                    c = mat[i][k]
                    if c:
                        grid[i][k][I] = grid[i][k].get(I, 0) + (c if isinstance(c, GaussianRational) else mpq(c))
        return cls._from_dicts(grid, p, N, shape)

    @classmethod
    def from_terms(cls, grid: Sequence[Sequence[Mapping]], p: int, N: int) -> "MatrixJet":
        """Build from a grid of ``{exponent tuple: coefficient}`` dicts."""
        return cls([[SeriesJet(p, N, t) for t in row] for row in grid], p, N,
                   (len(grid), len(grid[0]) if grid else 0))

    # -- views ------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def term_dicts(self):
        return [[s.terms for s in row] for row in self.entries]

    def coefficient(self, I) -> list[list]:
        I = tuple(I)
        return [[s.terms.get(I, mpq(0)) for s in row] for row in self.entries]

    def coefficients(self) -> dict:
        """Nonzero coefficient matrices keyed by multi-index, in monomial order."""
        keys = set()
        for row in self.entries:
            for s in row:
                keys.update(s.terms)
        return {I: self.coefficient(I) for I in sorted(keys, key=monomial_key)}

    def valuation(self):
        return min((s.valuation() for row in self.entries for s in row), default=math.inf)

    def is_zero(self) -> bool:
        return all(not s.terms for row in self.entries for s in row)

    def __getitem__(self, idx) -> SeriesJet:
        i, k = idx
        return self.entries[i][k]

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other: "MatrixJet"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")
        _check_compatible(self, other)

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        self._check_same(other)
        grid = []
        for ra, rb in zip(self.entries, other.entries):
            row = []
            for a, b in zip(ra, rb):
                d = dict(a.terms)
                for e, c in b.terms.items():
                    d[e] = d[e] + c if e in d else c
                row.append(d)
            grid.append(row)
        return MatrixJet._from_dicts(grid, self.p, self.trunc_order, self.shape)

    def __neg__(self) -> "MatrixJet":
        return self.scale(-1)

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        return self + (-other)

    def scale(self, c) -> "MatrixJet":
        grid = [[{e: v * c for e, v in s.terms.items()} for s in row] for row in self.entries]
        return MatrixJet._from_dicts(grid, self.p, self.trunc_order, self.shape)

    def __rmul__(self, c) -> "MatrixJet":
        return self.scale(c)

    def __matmul__(self, other: "MatrixJet") -> "MatrixJet":
        return mul(self, other)

    def transpose(self) -> "MatrixJet":
        grid = [[self.entries[i][k].terms for i in range(self.rows)] for k in range(self.cols)]
        return MatrixJet._from_dicts(grid, self.p, self.trunc_order, (self.cols, self.rows))

    @property
    def T(self) -> "MatrixJet":
        return self.transpose()

    def conjugate(self) -> "MatrixJet":
        grid = [[{e: conj(c) for e, c in s.terms.items()} for s in row] for row in self.entries]
        return MatrixJet._from_dicts(grid, self.p, self.trunc_order, self.shape)

    def project(self, j: int) -> "MatrixJet":
        return project(self, j)

    def homogeneous(self, j: int) -> "MatrixJet":
        return homogeneous(self, j)

    def retruncate(self, N: int) -> "MatrixJet":
        """Change the truncation order; raising it reads the jet as its polynomial."""
        grid = [[{e: c for e, c in s.terms.items() if sum(e) <= N} for s in row] for row in self.entries]
        return MatrixJet._from_dicts(grid, self.p, N, self.shape)

    def map_entries(self, fn) -> "MatrixJet":
        return MatrixJet([[fn(s) for s in row] for row in self.entries], self.p, self.trunc_order, self.shape)

    # -- comparison / text --------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MatrixJet):
            return NotImplemented
        return (self.shape, self.p, self.trunc_order, self.entries) == (
            other.shape, other.p, other.trunc_order, other.entries)

    def __hash__(self):
        return hash((self.shape, self.p, self.trunc_order, self.entries))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.p)
        return "[" + "; ".join(", ".join(s.to_text(names) for s in row) for row in self.entries) + "]"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MatrixJet({self.rows}x{self.cols}, p={self.p}, N={self.trunc_order}, {self.to_text()!r})"

    def to_json(self) -> list:
        return [[series_to_json(s) for s in row] for row in self.entries]

    @classmethod
    def from_json(cls, data: list, p: int, N: int, field=None) -> "MatrixJet":
        rows = [[series_from_json(t, p, N, field) for t in row] for row in data]
        return cls(rows, p, N, (len(rows), len(rows[0]) if rows else 0))


def _check_compatible(A: MatrixJet, B: MatrixJet) -> None:
    if A.p != B.p:
        raise ShapeError(f"variable count mismatch: {A.p} vs {B.p}")
    if A.trunc_order != B.trunc_order:
        raise TruncationMismatchError(f"truncation order mismatch: {A.trunc_order} vs {B.trunc_order}")


# --------------------------------------------------------------------------
# operations


def mul(A: MatrixJet, B: MatrixJet) -> MatrixJet:
    """Exact product truncated at the common truncation order."""
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    _check_compatible(A, B)
    N = A.trunc_order
    a = A.term_dicts()
    b = B.term_dicts()
    grid = []
    for i in range(A.rows):
        row = []
        for k in range(B.cols):
            acc: dict = {}
            for l in range(A.cols):
                _mul_into(acc, a[i][l], b[l][k], N)
            row.append(acc)
        grid.append(row)
    return MatrixJet._from_dicts(grid, A.p, N, (A.rows, B.cols))


def _check_degree(A: MatrixJet, j: int) -> None:
    if j > A.trunc_order:
        raise DegreeRangeError(f"degree {j} exceeds truncation order {A.trunc_order}")


def project(A: MatrixJet, j: int) -> MatrixJet:
    """The j-jet: keep monomials of degree <= j."""
    _check_degree(A, j)
    grid = [[{e: c for e, c in s.terms.items() if sum(e) <= j} for s in row] for row in A.entries]
    return MatrixJet._from_dicts(grid, A.p, A.trunc_order, A.shape)


def homogeneous(A: MatrixJet, j: int) -> MatrixJet:
    """The homogeneous degree-j summand."""
    _check_degree(A, j)
    grid = [[{e: c for e, c in s.terms.items() if sum(e) == j} for s in row] for row in A.entries]
    return MatrixJet._from_dicts(grid, A.p, A.trunc_order, A.shape)


def inner_product(A: MatrixJet, B: MatrixJet):
    """Factorial-weighted Frobenius product: sum_I trace(B_I^* A_I) * I!."""
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    _check_compatible(A, B)
    total = mpq(0)
    for ra, rb in zip(A.entries, B.entries):
        for a, b in zip(ra, rb):
            bt = b.terms
            for e, c in a.terms.items():
                d = bt.get(e)
                if d is not None:
                    total = total + c * conj(d) * mi_factorial(e)
    return total


def apply_diff_op(B: MatrixJet, P: MatrixJet) -> MatrixJet:
    """Apply the operator sum_I B_I^* d^|I|/dx^I to P.

    ``B`` is m x n, ``P`` is m x n'; the result is n x n'.
    """
    if B.rows != P.rows:
        raise ShapeError(f"operator from {B.rows}x{B.cols} symbol cannot act on {P.rows}x{P.cols}")
    _check_compatible(B, P)
    n, n2 = B.cols, P.cols
    pd = P.term_dicts()
    out = [[{} for _ in range(n2)] for _ in range(n)]
    for I, BI in B.coefficients().items():
        deriv = [[_derivative(pd[s][c], I) for c in range(n2)] for s in range(P.rows)]
        for r in range(n):
            for s in range(B.rows):
                w = BI[s][r]
                if not w:
                    continue
                w = conj(w)
                for c in range(n2):
                    acc = out[r][c]
                    for e, v in deriv[s][c].items():
                        acc[e] = acc[e] + w * v if e in acc else w * v
    return MatrixJet._from_dicts(out, P.p, P.trunc_order, (n, n2))


def d_operator(B: MatrixJet, P: MatrixJet) -> tuple[MatrixJet, MatrixJet]:
    """The pair (nu_l, nu_r) adjoint to nu -> nu_l B - B nu_r, evaluated at P."""
    if B.shape != P.shape:
        raise ShapeError(f"shape mismatch: {B.shape} vs {P.shape}")
    nu_l = apply_diff_op(B.transpose(), P.transpose()).transpose()
    nu_r = -apply_diff_op(B, P)
    return nu_l, nu_r


def pair_inner_product(nu: tuple, mu: tuple):
    return inner_product(nu[0], mu[0]) + inner_product(nu[1], mu[1])


def constant_part(A: MatrixJet) -> list[list]:
    return A.coefficient((0,) * A.p)


def zeros_like(A: MatrixJet) -> MatrixJet:
    return MatrixJet.zeros(A.rows, A.cols, A.p, A.trunc_order)


def matrix_units(m: int, n: int) -> Iterable[tuple[int, int]]:
    for i in range(m):
        for k in range(n):
            yield i, k
