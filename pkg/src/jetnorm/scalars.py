"""Exact scalars over Q and Q(i).

Rationals are ``gmpy2.mpq`` values (always in lowest terms with a positive
denominator). Gaussian rationals are :class:`GaussianRational` pairs. Both
expose ``conjugate()``, so generic code calls :func:`conj` and never needs to
know which field it is working in.
"""

from __future__ import annotations

import enum
import re

from gmpy2 import mpq

from .errors import ConfigurationError, InvalidInputError

__all__ = [
    "Field",
    "GaussianRational",
    "QQ",
    "conj",
    "field_from_name",
    "format_scalar",
    "is_real",
    "norm",
    "parse_scalar",
]

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)


class Field(enum.Enum):
    RATIONAL = "rational"
    GAUSSIAN = "gaussian"

    def coerce(self, value):
        if isinstance(value, GaussianRational):
            if self is Field.RATIONAL:
                if value.im != 0:
                    raise InvalidInputError(f"non-real scalar {format_scalar(value)} in rational mode")
                return value.re
            return value
        q = mpq(value)
        return GaussianRational(q, ZERO) if self is Field.GAUSSIAN else q


def field_from_name(name: str) -> Field:
    try:
        return Field(name.lower())
    except ValueError:
        raise ConfigurationError(
            f"unsupported field {name!r}: only 'rational' (Q) and 'gaussian' (Q(i)) are available"
        ) from None


def _q(x):
    if isinstance(x, GaussianRational):
        return x
    return mpq(x)


class GaussianRational:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _parts(other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        return mpq(other), ZERO

    def __add__(self, other):
        a, b = self._parts(other)
        return GaussianRational(self.re + a, self.im + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._parts(other)
        return GaussianRational(self.re - a, self.im - b)

    def __rsub__(self, other):
        a, b = self._parts(other)
        return GaussianRational(a - self.re, b - self.im)

    def __mul__(self, other):
        a, b = self._parts(other)
        return GaussianRational(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._parts(other)
        d = a * a + b * b
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((self.re * a + self.im * b) / d, (self.im * a - self.re * b) / d)

    def __rtruediv__(self, other):
        return GaussianRational(*self._parts(other)) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        try:
            a, b = self._parts(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == a and self.im == b

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


def conj(s):
    return s.conjugate()


def norm(s):
    """s * conj(s) as a nonnegative rational."""
    if isinstance(s, GaussianRational):
        return s.re * s.re + s.im * s.im
    return mpq(s) * mpq(s)


def is_real(s) -> bool:
    return not isinstance(s, GaussianRational) or s.im == 0


def real_part(s):
    return s.re if isinstance(s, GaussianRational) else mpq(s)


def _fmt_q(q) -> str:
    q = mpq(q)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s, gaussian: bool | None = None) -> str:
    """Serialize as ``num/den`` or, for Gaussian values, ``a/b+c/d*i``."""
    if gaussian is None:
        gaussian = isinstance(s, GaussianRational)
    if not gaussian:
        if isinstance(s, GaussianRational):
            if s.im != 0:
                raise InvalidInputError("cannot format a non-real scalar as a rational")
            s = s.re
        return _fmt_q(s)
    re_, im_ = GaussianRational._parts(s)
    sign = "-" if im_ < 0 else "+"
    return f"{_fmt_q(re_)}{sign}{_fmt_q(abs(im_))}*i"


_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS_RE = re.compile(rf"^\s*({_RAT})\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*i\s*$")
_RAT_RE = re.compile(rf"^\s*({_RAT})\s*$")


def parse_scalar(text: str, field: Field = Field.RATIONAL):
    """Inverse of :func:`format_scalar`."""
    m = _GAUSS_RE.match(text)
    if m:
        if field is Field.RATIONAL:
            raise InvalidInputError(f"Gaussian scalar {text!r} given in rational mode")
        im_ = mpq(m.group(3))
        return GaussianRational(mpq(m.group(1)), im_ if m.group(2) == "+" else -im_)
    m = _RAT_RE.match(text)
    if not m:
        raise InvalidInputError(f"malformed scalar {text!r}")
    q = mpq(m.group(1))
    return field.coerce(q)
