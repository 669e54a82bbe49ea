"""Seeded random jets and group elements for experiments and tests."""

from __future__ import annotations

import random

from gmpy2 import mpq

from .groups import GroupElementJet, GroupKind
from .jets import MatrixJet, monomials_upto
from .scalars import Field, GaussianRational


def rand_scalar(rng: random.Random, bound: int = 3, field: Field = Field.RATIONAL, nonzero: bool = False):
    while True:
        q = mpq(rng.randint(-bound, bound), rng.randint(1, 2))
        if field is Field.GAUSSIAN:
            q = GaussianRational(q, mpq(rng.randint(-bound, bound), rng.randint(1, 2)))
        if q or not nonzero:
            return q


def random_jet(rng: random.Random, m: int, n: int, p: int, N: int, lo: int = 0, hi: int | None = None,
               density: float = 0.5, bound: int = 3, field: Field = Field.RATIONAL) -> MatrixJet:
    """Random m x n jet with terms in degrees lo..hi (default N)."""
    hi = N if hi is None else hi
    monos = monomials_upto(p, lo, hi)
    grid = [[{} for _ in range(n)] for _ in range(m)]
    for row in grid:
        for cell in row:
            for I in monos:
                if rng.random() < density:
                    c = rand_scalar(rng, bound, field)
                    if c:
                        cell[I] = c
    return MatrixJet._from_dicts(grid, p, N, (m, n))


def random_unipotent_matrix(rng: random.Random, m: int, p: int, N: int, density: float = 0.5) -> MatrixJet:
    return MatrixJet.identity(m, p, N) + random_jet(rng, m, m, p, N, lo=1, density=density)


def random_unipotent(rng: random.Random, kind: GroupKind, m: int, n: int, p: int, N: int,
                     density: float = 0.5) -> GroupElementJet:
    """Random element of the unipotent group of ``kind`` acting on m x n jets."""
    U = random_unipotent_matrix(rng, m, p, N, density)
    if kind is GroupKind.LEFT:
        return GroupElementJet(U, MatrixJet.identity(n, p, N), kind)
    if kind is GroupKind.RIGHT:
        return GroupElementJet(MatrixJet.identity(m, p, N), random_unipotent_matrix(rng, n, p, N, density), kind)
    if kind is GroupKind.CONJUGACY:
        return GroupElementJet(U, U, kind)
    if kind is GroupKind.CONGRUENCE:
        return GroupElementJet.from_U(U, kind)
    return GroupElementJet(U, random_unipotent_matrix(rng, n, p, N, density), kind)


def smith_diagonal(exponents, m: int, n: int, N: int) -> MatrixJet:
    """diag(x^e1, x^e2, ...) in one variable; ``None`` marks a zero entry."""
    grid = [[{} for _ in range(n)] for _ in range(m)]
    for i, e in enumerate(exponents):
        if e is not None and e <= N:
            grid[i][i][(e,)] = mpq(1)
    return MatrixJet._from_dicts(grid, 1, N, (m, n))


def random_smith_exponents(rng: random.Random, size: int, N: int) -> list:
    """Nondecreasing exponents in 0..N, occasionally ending in zeros (None)."""
    exps = sorted(rng.randint(0, N) for _ in range(size))
    zeros = rng.choice([0, 0, 0, 1])
    return exps[:size - zeros] + [None] * zeros
