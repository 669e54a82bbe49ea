"""Coordinates on graded jet spaces and the subspaces V^(j), W^(j).

Basis order is fixed: for matrix spaces, monomial (graded order) then
row-major matrix unit; for Lie-pair spaces, the nu_l block precedes the
nu_r block and inside a block the same monomial/unit order applies. The
conjugacy and congruence kinds use a single block of constrained pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import config
from .errors import DegreeRangeError, GuardrailError, NotInSubspaceError, ShapeError
from .groups import GroupKind, LieElementJet
from .jets import MatrixJet, mi_factorial, monomials_upto
from .linalg import Echelon, axpy, dot, min_norm_solution, nullspace, rref, solve
from .scalars import conj

__all__ = [
    "GradedBasis",
    "GradedSubspace",
    "LinearOperatorMatrix",
    "VSpace",
    "assemble_action",
    "decompose",
    "kernel",
    "preimage_nu",
    "v_space",
    "w_complement",
]

_BLOCKS = {
    GroupKind.LEFT: ("l",),
    GroupKind.RIGHT: ("r",),
    GroupKind.TWO_SIDED: ("l", "r"),
    GroupKind.CONJUGACY: ("c",),
    GroupKind.CONGRUENCE: ("t",),
}


def _mono_text(I) -> str:
    parts = []
    for k, e in enumerate(I):
        if e == 1:
            parts.append(f"x{k + 1}")
        elif e > 1:
            parts.append(f"x{k + 1}^{e}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class GradedBasis:
    """Ordered basis of a matrix space or of a Lie-pair space, degrees d_lo..d_hi."""

    space: str
    m: int
    n: int
    p: int
    d_lo: int
    d_hi: int
    kind: GroupKind | None = None
    elements: tuple = field(default=(), compare=False, repr=False)
    index: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def matrix_space(cls, m: int, n: int, p: int, d_lo: int, d_hi: int) -> "GradedBasis":
        elems = tuple((I, r, c) for I in monomials_upto(p, d_lo, d_hi) for r in range(m) for c in range(n))
        return cls("matrix", m, n, p, d_lo, d_hi, None, elems, {e: i for i, e in enumerate(elems)})

    @classmethod
    def lie_space(cls, kind: GroupKind, m: int, n: int, p: int, d_lo: int, d_hi: int) -> "GradedBasis":
        kind.check_shape(m, n)
        d_lo = max(d_lo, 1)
        monos = monomials_upto(p, d_lo, d_hi)
        elems = []
        for block in _BLOCKS[kind]:
            size = n if block == "r" else m
            elems.extend((block, I, a, b) for I in monos for a in range(size) for b in range(size))
        elems = tuple(elems)
        return cls("lie", m, n, p, d_lo, d_hi, kind, elems, {e: i for i, e in enumerate(elems)})

    @property
    def dim(self) -> int:
        return len(self.elements)

    def weight(self, i: int):
        e = self.elements[i]
        if self.space == "matrix":
            return mi_factorial(e[0])
        w = mi_factorial(e[1])
        return 2 * w if e[0] in ("c", "t") else w

    def weights(self) -> list:
        return [self.weight(i) for i in range(self.dim)]

    def degree_of(self, i: int) -> int:
        e = self.elements[i]
        return sum(e[0] if self.space == "matrix" else e[1])

    def label(self, i: int) -> str:
        e = self.elements[i]
        if self.space == "matrix":
            I, r, c = e
            return f"{_mono_text(I)}*E[{r + 1},{c + 1}]"
        block, I, a, b = e
        return f"{block}:{_mono_text(I)}*E[{a + 1},{b + 1}]"

    # -- coordinates <-> jets ------------------------------------------------

    def to_jet(self, vec: dict, N: int):
        if self.space == "matrix":
            grid = [[{} for _ in range(self.n)] for _ in range(self.m)]
            for i, c in vec.items():
                I, r, k = self.elements[i]
                grid[r][k][I] = c
            return MatrixJet._from_dicts(grid, self.p, N, (self.m, self.n))
        gl = [[{} for _ in range(self.m)] for _ in range(self.m)]
        gr = [[{} for _ in range(self.n)] for _ in range(self.n)]
        for i, c in vec.items():
            block, I, a, b = self.elements[i]
            if block in ("l", "c", "t"):
                _acc(gl[a][b], I, c)
            if block in ("r", "c"):
                _acc(gr[a][b], I, c)
            if block == "t":
                _acc(gr[b][a], I, -c)
        return LieElementJet(MatrixJet._from_dicts(gl, self.p, N, (self.m, self.m)),
                             MatrixJet._from_dicts(gr, self.p, N, (self.n, self.n)), self.kind)

    def from_jet(self, A) -> dict:
        """Coordinates of a matrix jet (matrix spaces) or Lie element (Lie spaces)."""
        if self.space == "matrix":
            if A.shape != (self.m, self.n) or A.p != self.p:
                raise ShapeError("jet does not live in this space")
            vec = {}
            for r, row in enumerate(A.entries):
                for c, s in enumerate(row):
                    for I, v in s.terms.items():
                        if not self.d_lo <= sum(I) <= self.d_hi:
                            raise DegreeRangeError(f"term of degree {sum(I)} outside {self.d_lo}..{self.d_hi}")
                        vec[self.index[(I, r, c)]] = v
            return vec
        vec = {}
        nl = A.nu_l.term_dicts()
        for block in _BLOCKS[self.kind]:
            src = A.nu_r.term_dicts() if block == "r" else nl
            for a, row in enumerate(src):
                for b, terms in enumerate(row):
                    for I, v in terms.items():
                        if not self.d_lo <= sum(I) <= self.d_hi:
                            raise DegreeRangeError(f"term of degree {sum(I)} outside {self.d_lo}..{self.d_hi}")
                        vec[self.index[(block, I, a, b)]] = v
        return vec


def _acc(d: dict, I, c) -> None:
    v = d.get(I)
    d[I] = c if v is None else v + c


@dataclass(frozen=True)
class LinearOperatorMatrix:
    domain: GradedBasis
    codomain: GradedBasis
    columns: tuple

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.codomain.dim)]
        for b, col in enumerate(self.columns):
            for k, v in col.items():
                out[k][b] = v
        return out

    def rank(self) -> int:
        ech = Echelon()
        for col in self.columns:
            ech.add(col)
        return ech.rank

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for b, c in vec.items():
            axpy(out, c, self.columns[b])
        return out

    def dump(self) -> str:
        lines = [f"operator {self.codomain.dim}x{self.domain.dim}"]
        for b, col in enumerate(self.columns):
            img = " + ".join(f"({v})*{self.codomain.label(k)}" for k, v in sorted(col.items())) or "0"
            lines.append(f"  {self.domain.label(b)} -> {img}")
        return "\n".join(lines)


@dataclass(frozen=True)
class GradedSubspace:
    """A subspace given by generators in reduced row echelon form."""

    ambient: GradedBasis
    generators: tuple
    pivots: tuple

    @classmethod
    def span(cls, ambient: GradedBasis, vectors) -> "GradedSubspace":
        piv, basis, _ = rref(list(vectors))
        return cls(ambient, tuple(basis), tuple(piv))

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def rank(self) -> int:
        return self.dim

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        for p, g in zip(self.pivots, self.generators):
            c = vec.get(p)
            if c:
                axpy(vec, -c, g)
        return vec

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def to_jets(self, N: int) -> list:
        return [self.ambient.to_jet(g, N) for g in self.generators]

    def dump(self) -> str:
        lines = [f"subspace of dim {self.dim} in {self.ambient.space} space "
                 f"(degrees {self.ambient.d_lo}..{self.ambient.d_hi}, ambient dim {self.ambient.dim})"]
        for g in self.generators:
            lines.append("  " + (" + ".join(f"({v})*{self.ambient.label(k)}" for k, v in sorted(g.items())) or "0"))
        return "\n".join(lines)


@dataclass(frozen=True)
class VSpace(GradedSubspace):
    """V^(j) together with witnesses and the operator needed for preimages."""

    witnesses: tuple = ()
    operator: LinearOperatorMatrix | None = None
    offset: int = 0
    trunc_order: int = 0


# --------------------------------------------------------------------------
# assembly


def _lie_image(elem, A_terms, m, n, p, hi, cindex):
    """Coordinates of pi_hi(nu A) for one Lie basis element."""
    block, I, a, b = elem
    room = hi - sum(I)
    out: dict = {}

    def add(r, c, K, v):
        e = tuple(x + y for x, y in zip(I, K))
        k = cindex[(e, r, c)]
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w = w + v
            if w:
                out[k] = w
            else:
                del out[k]

    if block in ("l", "c", "t"):
        # nu_l = x^I E_ab: row a of the image gets x^I * (row b of A)
        for c in range(n):
            for K, v in A_terms[b][c].items():
                if sum(K) <= room:
                    add(a, c, K, v)
    if block in ("r", "c"):
        # -A nu_r with nu_r = x^I E_ab: column b gets -x^I * (column a of A)
        for r in range(m):
            for K, v in A_terms[r][a].items():
                if sum(K) <= room:
                    add(r, b, K, -v)
    if block == "t":
        # nu_r = -x^I E_ba: column a gets +x^I * (column b of A)
        for r in range(m):
            for K, v in A_terms[r][b].items():
                if sum(K) <= room:
                    add(r, a, K, v)
    return out


def _guard(dim: int, cap: int | None) -> None:
    limit = config.max_columns(cap)
    if dim > limit:
        raise GuardrailError(
            f"Lie basis has {dim} columns, above the cap of {limit} "
            f"(raise it with {config.ENV_MAX_COLUMNS})")


def assemble_action(A: MatrixJet, kind: GroupKind, j: int, *, max_columns: int | None = None) -> LinearOperatorMatrix:
    """Matrix of nu -> pi_j(nu_l A - A nu_r) on Lie pairs of degrees 1..j."""
    if j < 0 or j > A.trunc_order:
        raise DegreeRangeError(f"degree {j} outside 0..{A.trunc_order}")
    m, n, p = A.rows, A.cols, A.p
    domain = GradedBasis.lie_space(kind, m, n, p, 1, j) if j >= 1 else GradedBasis("lie", m, n, p, 1, 0, kind)
    _guard(domain.dim, max_columns)
    codomain = GradedBasis.matrix_space(m, n, p, 0, j)
    terms = A.project(j - 1).term_dicts() if j >= 1 else A.term_dicts()
    cols = tuple(_lie_image(e, terms, m, n, p, j, codomain.index) for e in domain.elements)
    return LinearOperatorMatrix(domain, codomain, cols)


def kernel(L: LinearOperatorMatrix) -> GradedSubspace:
    basis = nullspace(L.rows(), range(L.domain.dim))
    return GradedSubspace.span(L.domain, basis)


def v_space(A: MatrixJet, kind: GroupKind, j: int, *, max_columns: int | None = None) -> VSpace:
    """V^(j) = {pi_j(nu A) : nu in Lie(G), pi_{j-1}(nu A) = 0}, with witnesses."""
    if j < 1 or j > A.trunc_order:
        raise DegreeRangeError(f"V^(j) needs 1 <= j <= {A.trunc_order}, got {j}")
    L = assemble_action(A, kind, j, max_columns=max_columns)
    offset = sum(1 for e in L.codomain.elements if sum(e[0]) < j)
    ech = Echelon()
    for b, col in enumerate(L.columns):
        ech.add(col, {b: mpq(1)})
    high = [(lead, vec, tag) for lead, (vec, tag) in ech.pivots.items() if lead >= offset]
    ambient = GradedBasis.matrix_space(A.rows, A.cols, A.p, j, j)
    vecs = [{k - offset: v for k, v in vec.items()} for _, vec, _ in high]
    piv, basis, tags = rref(vecs, [tag for _, _, tag in high])
    return VSpace(ambient, tuple(basis), tuple(piv), tuple(tags), L, offset, A.trunc_order)


def w_complement(V: GradedSubspace) -> GradedSubspace:
    """Orthogonal complement for the factorial-weighted inner product."""
    amb = V.ambient
    w = amb.weights()
    rows = [{k: conj(v) * w[k] for k, v in g.items()} for g in V.generators]
    basis = nullspace(rows, range(amb.dim))
    return GradedSubspace.span(amb, basis)


def decompose(h: MatrixJet, V: GradedSubspace):
    """Split h = v + w with v in V and w orthogonal to V."""
    amb = V.ambient
    vec = amb.from_jet(h)
    w = amb.weights()
    gens = V.generators
    if not gens:
        return amb.to_jet({}, h.trunc_order), h
    gram_rows = [{b: dot(gb, ga, w) for b, gb in enumerate(gens) if dot(gb, ga, w)} for ga in gens]
    rhs = [dot(vec, ga, w) for ga in gens]
    y = solve(gram_rows, rhs)
    v: dict = {}
    for b, c in y.items():
        axpy(v, c, gens[b])
    rest = dict(vec)
    axpy(rest, mpq(-1), v)
    N = h.trunc_order
    return amb.to_jet(v, N), amb.to_jet(rest, N)


def preimage_nu(v: MatrixJet, V: VSpace) -> LieElementJet:
    """Minimum-norm nu with pi_{j-1}(nu A) = 0 and pi_j(nu A) = v."""
    amb = V.ambient
    vec = amb.from_jet(v)
    if not V.contains(vec):
        raise NotInSubspaceError("target is not in V^(j)")
    L = V.operator
    dom = L.domain
    if not vec:
        return dom.to_jet({}, v.trunc_order) if dom.dim else LieElementJet.zero(
            dom.kind, dom.m, dom.n, dom.p, v.trunc_order)
    rows = L.rows()
    rhs = [mpq(0)] * len(rows)
    for k, c in vec.items():
        rhs[k + V.offset] = c
    nu = min_norm_solution(rows, dom.dim, rhs, dom.weights())
    if nu is None:
        raise NotInSubspaceError("no preimage found")
    return dom.to_jet(nu, v.trunc_order)
