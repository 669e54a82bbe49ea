"""Brute-force sympy reference computations, independent of jetnorm's linear algebra."""

from __future__ import annotations

import itertools

import sympy as sp

from jetnorm.groups import GroupKind


def xs(p):
    return sp.symbols(f"x1:{p + 1}")


def to_sympy(A, p):
    """MatrixJet -> sympy Matrix of polynomials (rational coefficients only)."""
    x = xs(p)
    rows = []
    for row in A.entries:
        out = []
        for s in row:
            e = 0
            for I, c in s.terms.items():
                e += sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[v ** k for v, k in zip(x, I)])
            out.append(sp.expand(e))
        rows.append(out)
    return sp.Matrix(rows)


def monomial_list(p, lo, hi):
    x = xs(p)
    out = []
    for d in range(lo, hi + 1):
        for I in itertools.product(range(d + 1), repeat=p):
            if sum(I) == d:
                out.append((I, sp.Mul(*[v ** k for v, k in zip(x, I)])))
    return out


def coeff_of(expr, I, p):
    poly = sp.Poly(expr, *xs(p))
    return poly.coeff_monomial(tuple(I))


def generic_lie(kind, m, n, p, j):
    """Generic Lie pair of degrees 1..j with one symbol per free coefficient."""
    monos = monomial_list(p, 1, j)
    syms = []

    def generic(size, tag):
        M = sp.zeros(size, size)
        for a in range(size):
            for b in range(size):
                for I, mono in monos:
                    s = sp.Symbol(f"{tag}_{a}_{b}_{'_'.join(map(str, I))}")
                    syms.append(s)
                    M[a, b] += s * mono
        return M

    if kind is GroupKind.LEFT:
        return generic(m, "l"), sp.zeros(n, n), syms
    if kind is GroupKind.RIGHT:
        return sp.zeros(m, m), generic(n, "r"), syms
    if kind is GroupKind.TWO_SIDED:
        L = generic(m, "l")
        return L, generic(n, "r"), syms
    L = generic(m, "l")
    if kind is GroupKind.CONJUGACY:
        return L, L, syms
    return L, -L.T, syms


def brute_v_space(A, kind, j):
    """Return (matrix of V generators as rows over the degree-j coordinates, coordinate labels).

    V = {pi_j(nu A) : pi_{j-1}(nu A) = 0}, computed by solving the linear
    conditions on a fully generic Lie pair.
    """
    m, n, p = A.rows, A.cols, A.p
    Asp = to_sympy(A, p)
    L, R, syms = generic_lie(kind, m, n, p, j)
    img = (L * Asp - Asp * R).applyfunc(sp.expand)
    low, top, labels = [], [], []
    for d in range(0, j + 1):
        for I, _ in monomial_list(p, d, d):
            for r in range(m):
                for c in range(n):
                    e = coeff_of(img[r, c], I, p) if img[r, c] != 0 else sp.Integer(0)
                    row = [sp.diff(e, s) for s in syms]
                    if d < j:
                        low.append(row)
                    else:
                        top.append(row)
                        labels.append((I, r, c))
    if not syms:
        return sp.zeros(0, len(labels)), labels
    Low = sp.Matrix(low) if low else sp.zeros(0, len(syms))
    Top = sp.Matrix(top)
    ker = Low.nullspace() if Low.rows else [sp.eye(len(syms))[:, k] for k in range(len(syms))]
    if not ker:
        return sp.zeros(0, len(labels)), labels
    K = sp.Matrix.hstack(*ker)
    image = (Top * K).T
    return image, labels


def weight(I):
    w = 1
    for k in I:
        w *= sp.factorial(k)
    return w
