"""The five transformation groups acting on matrix jets.

Conventions (all checked against the derivative of the action):

* left       U A,            Lie pairs (nu, 0)
* right      A V^-1,         Lie pairs (0, nu)
* two-sided  U A V^-1,       Lie pairs (nu_l, nu_r)
* conjugacy  U A U^-1,       Lie pairs (nu, nu)
* congruence U A U^T,        Lie pairs (nu, -nu^T)

In every case a group element is stored as ``(U, V)`` with the action
``U A V^-1``; for congruence ``V = (U^T)^-1`` is derived from ``U``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import DegreeRangeError, InvalidInputError, ShapeError, SingularConstantTermError
from .jets import MatrixJet, constant_part, inner_product, mul
from .linalg import dense_det, dense_inverse

__all__ = [
    "GroupKind",
    "GroupElementJet",
    "LieElementJet",
    "act",
    "compose",
    "delta_project",
    "exp_jet",
    "exp_lie",
    "invert_jet",
    "lie_act",
    "log_jet",
]


class GroupKind(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    TWO_SIDED = "two-sided"
    CONJUGACY = "conjugacy"
    CONGRUENCE = "congruence"

    @classmethod
    def parse(cls, name: str) -> "GroupKind":
        key = name.lower().replace("_", "-")
        aliases = {"lr": "two-sided", "twosided": "two-sided", "l": "left", "r": "right",
                   "c": "conjugacy", "t": "congruence"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidInputError(
                f"unknown group {name!r}; choose from {', '.join(k.value for k in cls)}") from None

    @property
    def square_only(self) -> bool:
        return self in (GroupKind.CONJUGACY, GroupKind.CONGRUENCE)

    def check_shape(self, m: int, n: int) -> None:
        if self.square_only and m != n:
            raise ShapeError(f"{self.value} needs a square matrix, got {m}x{n}")


# --------------------------------------------------------------------------
# jet inversion, exp and log


def _require_square(U: MatrixJet) -> None:
    if U.rows != U.cols:
        raise ShapeError(f"expected a square matrix, got {U.rows}x{U.cols}")


def invert_jet(U: MatrixJet) -> MatrixJet:
    """Inverse through the truncation order, degree by degree."""
    _require_square(U)
    p, N, n = U.p, U.trunc_order, U.rows
    U0 = constant_part(U)
    try:
        W0 = dense_inverse(U0)
    except SingularConstantTermError:
        raise SingularConstantTermError("constant term of the jet is singular") from None
    W0jet = MatrixJet.from_constant(W0, p, N)
    pieces = [U.homogeneous(d) for d in range(N + 1)]
    W = [W0jet]
    for d in range(1, N + 1):
        acc = MatrixJet.zeros(n, n, p, N)
        for k in range(1, d + 1):
            if not pieces[k].is_zero() and not W[d - k].is_zero():
                acc = acc + mul(pieces[k], W[d - k])
        W.append(-mul(W0jet, acc))
    out = W[0]
    for piece in W[1:]:
        out = out + piece
    return out


def _factorial(k: int) -> int:
    out = 1
    for t in range(2, k + 1):
        out *= t
    return out


def exp_jet(lam: MatrixJet) -> MatrixJet:
    """sum_i lam^i / i!, exact because lam has no constant term."""
    _require_square(lam)
    if any(c for row in constant_part(lam) for c in row):
        raise InvalidInputError("exp_jet needs a jet with zero constant term")
    N = lam.trunc_order
    out = MatrixJet.identity(lam.rows, lam.p, N)
    power = out
    for i in range(1, N + 1):
        power = mul(power, lam)
        if power.is_zero():
            break
        out = out + power.scale(mpq(1, _factorial(i)))
    return out


def log_jet(U: MatrixJet) -> MatrixJet:
    """sum_i (-1)^(i-1) u^i / i with u = U - 1; inverse of :func:`exp_jet`."""
    _require_square(U)
    one = MatrixJet.identity(U.rows, U.p, U.trunc_order)
    u = U - one
    if any(c for row in constant_part(u) for c in row):
        raise InvalidInputError("log_jet needs a jet whose constant term is the identity")
    out = MatrixJet.zeros(U.rows, U.rows, U.p, U.trunc_order)
    power = one
    for i in range(1, U.trunc_order + 1):
        power = mul(power, u)
        if power.is_zero():
            break
        out = out + power.scale(mpq((-1) ** (i - 1), i))
    return out


# --------------------------------------------------------------------------
# group and Lie elements


def _is_identity_const(M) -> bool:
    return all((c == 1) if i == k else (not c) for i, row in enumerate(M) for k, c in enumerate(row))


@dataclass(frozen=True)
class GroupElementJet:
    """g = (U, V) acting by A -> U A V^-1 (V is derived for congruence)."""

    U: MatrixJet
    V: MatrixJet
    kind: GroupKind

    def __post_init__(self):
        U, V, kind = self.U, self.V, self.kind
        _require_square(U)
        _require_square(V)
        if not dense_det(constant_part(U)) or not dense_det(constant_part(V)):
            raise SingularConstantTermError("group element has a singular constant term")
        one_u = MatrixJet.identity(U.rows, U.p, U.trunc_order)
        one_v = MatrixJet.identity(V.rows, V.p, V.trunc_order)
        if kind is GroupKind.LEFT and V != one_v:
            raise InvalidInputError("left transformations need V = identity")
        if kind is GroupKind.RIGHT and U != one_u:
            raise InvalidInputError("right transformations need U = identity")
        if kind is GroupKind.CONJUGACY and U != V:
            raise InvalidInputError("conjugacy transformations need V = U")
        if kind is GroupKind.CONGRUENCE and mul(U.transpose(), V) != one_u:
            raise InvalidInputError("congruence transformations need V = (U^T)^-1")

    @classmethod
    def from_U(cls, U: MatrixJet, kind: GroupKind, V: MatrixJet | None = None) -> "GroupElementJet":
        """Build an element, filling in whatever the kind determines."""
        if kind is GroupKind.CONGRUENCE:
            return cls(U, invert_jet(U.transpose()), kind)
        if kind is GroupKind.CONJUGACY:
            return cls(U, U, kind)
        if kind is GroupKind.LEFT:
            return cls(U, MatrixJet.identity(U.rows, U.p, U.trunc_order) if V is None else V, kind)
        if V is None:
            raise InvalidInputError(f"{kind.value} elements need both U and V")
        return cls(U, V, kind)

    @classmethod
    def right(cls, V: MatrixJet) -> "GroupElementJet":
        return cls(MatrixJet.identity(V.rows, V.p, V.trunc_order), V, GroupKind.RIGHT)

    @classmethod
    def identity(cls, kind: GroupKind, m: int, n: int, p: int, N: int) -> "GroupElementJet":
        kind.check_shape(m, n)
        return cls(MatrixJet.identity(m, p, N), MatrixJet.identity(n, p, N), kind)

    @property
    def is_unipotent(self) -> bool:
        return _is_identity_const(constant_part(self.U)) and _is_identity_const(constant_part(self.V))

    def project(self, j: int) -> "GroupElementJet":
        if self.kind is GroupKind.CONGRUENCE:
            return GroupElementJet.from_U(self.U.project(j), self.kind)
        return GroupElementJet(self.U.project(j), self.V.project(j), self.kind)

    def inverse(self) -> "GroupElementJet":
        return GroupElementJet(invert_jet(self.U), invert_jet(self.V), self.kind)

    def to_json(self, names=None) -> dict:
        out = {"kind": self.kind.value, "U": self.U.to_text(names)}
        if self.kind in (GroupKind.RIGHT, GroupKind.TWO_SIDED):
            out["V"] = self.V.to_text(names)
        if self.kind is GroupKind.RIGHT:
            del out["U"]
        return out


def compose(g: GroupElementJet, h: GroupElementJet) -> GroupElementJet:
    """The element acting as g after h."""
    if g.kind is not h.kind:
        raise InvalidInputError(f"cannot compose {g.kind.value} with {h.kind.value}")
    return GroupElementJet(mul(g.U, h.U), mul(g.V, h.V), g.kind)


@dataclass(frozen=True)
class LieElementJet:
    """A pair (nu_l, nu_r) with zero constant terms obeying the kind's constraint."""

    nu_l: MatrixJet
    nu_r: MatrixJet
    kind: GroupKind = field(default=GroupKind.TWO_SIDED)

    def __post_init__(self):
        l, r, kind = self.nu_l, self.nu_r, self.kind
        _require_square(l)
        _require_square(r)
        if not l.project(0).is_zero() or not r.project(0).is_zero():
            raise InvalidInputError("Lie elements have zero constant terms")
        if kind is GroupKind.LEFT and not r.is_zero():
            raise InvalidInputError("left Lie elements have nu_r = 0")
        if kind is GroupKind.RIGHT and not l.is_zero():
            raise InvalidInputError("right Lie elements have nu_l = 0")
        if kind is GroupKind.CONJUGACY and l != r:
            raise InvalidInputError("conjugacy Lie elements have nu_r = nu_l")
        if kind is GroupKind.CONGRUENCE and r != -l.transpose():
            raise InvalidInputError("congruence Lie elements have nu_r = -nu_l^T")

    @classmethod
    def zero(cls, kind: GroupKind, m: int, n: int, p: int, N: int) -> "LieElementJet":
        return cls(MatrixJet.zeros(m, m, p, N), MatrixJet.zeros(n, n, p, N), kind)

    def scale(self, c) -> "LieElementJet":
        return LieElementJet(self.nu_l.scale(c), self.nu_r.scale(c), self.kind)

    def __add__(self, other: "LieElementJet") -> "LieElementJet":
        return LieElementJet(self.nu_l + other.nu_l, self.nu_r + other.nu_r, self.kind)

    def __neg__(self) -> "LieElementJet":
        return self.scale(-1)

    def is_zero(self) -> bool:
        return self.nu_l.is_zero() and self.nu_r.is_zero()

    def inner(self, other: "LieElementJet"):
        return inner_product(self.nu_l, other.nu_l) + inner_product(self.nu_r, other.nu_r)


def exp_lie(nu: LieElementJet) -> GroupElementJet:
    U = exp_jet(nu.nu_l)
    if nu.kind is GroupKind.CONGRUENCE:
        return GroupElementJet.from_U(U, nu.kind)
    if nu.kind is GroupKind.CONJUGACY:
        return GroupElementJet(U, U, nu.kind)
    return GroupElementJet(U, exp_jet(nu.nu_r), nu.kind)


# --------------------------------------------------------------------------
# actions


def act(g: GroupElementJet, A: MatrixJet) -> MatrixJet:
    kind = g.kind
    if g.U.rows != A.rows or g.V.rows != A.cols:
        raise ShapeError(f"{kind.value} element of size ({g.U.rows}, {g.V.rows}) cannot act on "
                         f"{A.rows}x{A.cols}")
    kind.check_shape(A.rows, A.cols)
    if kind is GroupKind.LEFT:
        return mul(g.U, A)
    if kind is GroupKind.RIGHT:
        return mul(A, invert_jet(g.V))
    if kind is GroupKind.CONGRUENCE:
        return mul(mul(g.U, A), g.U.transpose())
    if kind is GroupKind.CONJUGACY:
        return mul(mul(g.U, A), invert_jet(g.U))
    return mul(mul(g.U, A), invert_jet(g.V))


def lie_act(nu: LieElementJet, A: MatrixJet) -> MatrixJet:
    """The linearized action nu_l A - A nu_r."""
    if nu.nu_l.rows != A.rows or nu.nu_r.rows != A.cols:
        raise ShapeError("Lie element does not match the matrix shape")
    return mul(nu.nu_l, A) - mul(A, nu.nu_r)


def delta_project(nu_l: MatrixJet, nu_r: MatrixJet, kind: GroupKind) -> LieElementJet:
    """Orthogonal projection of an arbitrary pair onto the kind's Lie algebra."""
    _require_square(nu_l)
    _require_square(nu_r)
    l = nu_l - nu_l.project(0)
    r = nu_r - nu_r.project(0)
    half = mpq(1, 2)
    if kind is GroupKind.TWO_SIDED:
        return LieElementJet(l, r, kind)
    if kind is GroupKind.LEFT:
        return LieElementJet(l, r.scale(0), kind)
    if kind is GroupKind.RIGHT:
        return LieElementJet(l.scale(0), r, kind)
    if l.shape != r.shape:
        raise ShapeError(f"{kind.value} needs pairs of equal size")
    if kind is GroupKind.CONJUGACY:
        s = (l + r).scale(half)
        return LieElementJet(s, s, kind)
    return LieElementJet((l - r.transpose()).scale(half), (r - l.transpose()).scale(half), kind)


def check_degree(j: int, N: int) -> None:
    if j < 0 or j > N:
        raise DegreeRangeError(f"degree {j} outside 0..{N}")
