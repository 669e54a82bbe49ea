"""Parser for polynomial matrices such as ``[x + x^2, 0; 0, 1/2*y]``.

Grammar::

    matrix := '[' row (';' row)* ']'
    row    := expr (',' expr)*
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'

Division is only allowed by nonzero constants. In Gaussian mode the name
``i`` is the imaginary unit. ``#`` starts a comment running to end of line.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .errors import ConfigurationError, ParseError, UnknownVariableError
from .jets import MatrixJet
from .scalars import Field, GaussianRational

log = logging.getLogger(__name__)

MAX_EXPONENT = 10_000

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))", re.S)


@dataclass
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    text = re.sub(r"#[^\n]*", lambda m: " " * len(m.group(0)), text)
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        if text[pos] in " \t\r\n":
            if text[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        col = start - line_start + 1
        if m.group(1):
            tokens.append(Token("num", m.group(1), line, col))
        elif m.group(2):
            tokens.append(Token("name", m.group(2), line, col))
        else:
            ch = m.group(3)
            if ch not in "[];,+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", line, col)
            tokens.append(Token("op", ch, line, col))
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Poly:
    """Polynomial as {exponents: coefficient}, truncated at degree N while parsing."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {e: c for e, c in (terms or {}).items() if c}


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], N: int, field: Field):
        self.tokens = tokenize(text)
        self.pos = 0
        self.vars = {name: k for k, name in enumerate(variables)}
        self.p = len(variables)
        self.N = N
        self.field = field
        self.dropped = False

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, op: str) -> Token:
        t = self.tok
        if t.kind != "op" or t.text != op:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {op!r}, found {found}", t.line, t.col)
        return self.advance()

    def at(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    # -- polynomial arithmetic --------------------------------------------

    def const(self, c) -> _Poly:
        return _Poly({(0,) * self.p: c})

    def add(self, a: _Poly, b: _Poly, sign=1) -> _Poly:
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, 0) + sign * c
        return _Poly(out)

    def mul(self, a: _Poly, b: _Poly) -> _Poly:
        out = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if sum(e) > self.N:
                    self.dropped = True
                    continue
                out[e] = out.get(e, 0) + ca * cb
        return _Poly(out)

    def as_constant(self, a: _Poly):
        zero = (0,) * self.p
        if any(e != zero for e in a.terms):
            return None
        return a.terms.get(zero, mpq(0))

    # -- grammar -----------------------------------------------------------

    def matrix(self) -> list[list[_Poly]]:
        self.expect("[")
        rows = [self.row()]
        while self.at(";"):
            self.advance()
            rows.append(self.row())
        self.expect("]")
        if self.tok.kind != "end":
            raise ParseError(f"trailing input {self.tok.text!r}", self.tok.line, self.tok.col)
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                t = self.tokens[self.pos - 1]
                raise ParseError(f"rows have different lengths ({width} and {len(r)})", t.line, t.col)
        return rows

    def row(self) -> list[_Poly]:
        out = [self.expr()]
        while self.at(","):
            self.advance()
            out.append(self.expr())
        return out

    def expr(self) -> _Poly:
        acc = self.term()
        while self.at("+", "-"):
            sign = 1 if self.advance().text == "+" else -1
            acc = self.add(acc, self.term(), sign)
        return acc

    def term(self) -> _Poly:
        acc = self.unary()
        while self.at("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                acc = self.mul(acc, rhs)
            else:
                c = self.as_constant(rhs)
                if c is None:
                    raise ParseError("division by a non-constant expression", op.line, op.col)
                if not c:
                    raise ParseError("division by zero", op.line, op.col)
                acc = _Poly({e: v / c for e, v in acc.terms.items()})
        return acc

    def unary(self) -> _Poly:
        if self.at("-"):
            self.advance()
            return _Poly({e: -c for e, c in self.unary().terms.items()})
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> _Poly:
        base = self.atom()
        if self.at("^"):
            self.advance()
            t = self.tok
            if t.kind != "num":
                raise ParseError("exponent must be a nonnegative integer", t.line, t.col)
            self.advance()
            k = int(t.text)
            if k > MAX_EXPONENT:
                raise ParseError(f"exponent {k} exceeds the limit {MAX_EXPONENT}", t.line, t.col)
            out = self.const(mpq(1))
            sq = base
            while k:
                if k & 1:
                    out = self.mul(out, sq)
                k >>= 1
                if k:
                    sq = self.mul(sq, sq)
            return out
        return base

    def atom(self) -> _Poly:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return self.const(mpq(int(t.text)))
        if t.kind == "name":
            self.advance()
            if t.text in self.vars:
                e = [0] * self.p
                e[self.vars[t.text]] = 1
                if self.N < 1:
                    self.dropped = True
                    return _Poly()
                return _Poly({tuple(e): mpq(1)})
            if t.text == "i" and self.field is Field.GAUSSIAN:
                return self.const(GaussianRational(0, 1))
            raise UnknownVariableError(t.text, t.line, t.col)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.line, t.col)


def parse_poly_matrix(text: str, variables: Sequence[str], N: int, field: Field = Field.RATIONAL,
                      notices: list | None = None) -> MatrixJet:
    """Parse ``text`` into a matrix jet of truncation order ``N``.

    Terms above degree ``N`` are dropped; a notice is appended to ``notices``
    (and logged) when that happens.
    """
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise ConfigurationError("variable names must be distinct")
    for v in variables:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ConfigurationError(f"invalid variable name {v!r}")
    if field is Field.GAUSSIAN and "i" in variables:
        raise ConfigurationError("'i' is the imaginary unit in gaussian mode and cannot be a variable")
    parser = _Parser(text, variables, N, field)
    rows = parser.matrix()
    if parser.dropped:
        msg = f"terms of degree above {N} were dropped"
        log.warning(msg)
        if notices is not None:
            notices.append(msg)
    grid = [[{e: field.coerce(c) for e, c in poly.terms.items()} for poly in row] for row in rows]
    return MatrixJet.from_terms(grid, len(variables), N)
