"""Plain-text expressions over a, a*, b, b*, A, B, B*, q and rationals.

Grammar (``*`` is the product, juxtaposition is not accepted)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ('-' | '+') factor | power
    power  := atom ('^' exponent)?
    atom   := 'a' | 'a*' | 'b' | 'b*' | 'A' | 'B' | 'B*' | 'q' | rational | '(' expr ')'

Exponents are non-negative integers, except on ``q`` where a signed
integer or half-integer (``q^-1``, ``q^(1/2)``, ``q^-3/2``) is allowed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from .laurent import LaurentScalar
from .qsymb import QPolynomial, adjoint, gen_A, gen_B, normal_form


class ParseError(ValueError):
    pass


_NUM = re.compile(r"\d+(?:\.\d+)?")
_ATOM_START = re.compile(r"[A-Za-z0-9(]")


def tokenize(text: str) -> List[Tuple[str, str]]:
    """Split into (kind, text) tokens.

    A ``*`` glued to ``a``, ``b`` or ``B`` is read as the adjoint unless an
    operand follows it: ``a*b`` and ``a* b`` are products, ``a*`` at the end
    or before ``+``, ``*``, ``^`` or ``)`` is the adjoint.  ``*-`` is always a
    product with a negated factor.
    """
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUM.match(text, pos)
        if m:
            out.append(("num", m.group()))
            pos = m.end()
            continue
        if ch in "abABq":
            if ch != "A" and ch != "q" and pos + 1 < n and text[pos + 1] == "*":
                rest = text[pos + 2:]
                nxt = rest.lstrip()[:1]
                glued_minus = rest[:1] == "-"
                if not (_ATOM_START.match(nxt) if nxt else False) and not glued_minus:
                    out.append(("name", ch + "*"))
                    pos += 2
                    continue
            out.append(("name", ch))
            pos += 1
            continue
        if ch in "-+*^()/":
            out.append(("op", ch))
            pos += 1
            continue
        raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 8]!r}")
    return out


def _atom_value(name: str) -> QPolynomial:
    if name in ("a", "a*", "b", "b*"):
        return normal_form([name])
    if name == "A":
        return gen_A()
    if name == "B":
        return gen_B()
    if name == "B*":
        return adjoint(gen_B())
    raise ParseError(f"unknown symbol {name!r}")


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of expression")
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> QPolynomial:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> QPolynomial:
        out = self.factor()
        while self.peek()[1] == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> QPolynomial:
        if self.peek()[1] == "-":
            self.take()
            return -self.factor()
        if self.peek()[1] == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self) -> QPolynomial:
        kind, val = self.peek()
        if kind == "name" and val == "q":
            self.take()
            e = self.exponent(allow_signed=True) if self.peek()[1] == "^" else Fraction(1)
            if (2 * e).denominator != 1:
                raise ParseError(f"q exponent {e} is not a half-integer")
            return QPolynomial.scalar(LaurentScalar.qpow(int(2 * e)))
        base = self.atom()
        if self.peek()[1] == "^":
            e = self.exponent(allow_signed=False)
            if e.denominator != 1:
                raise ParseError(f"exponent {e} must be an integer")
            return base ** int(e)
        return base

    def exponent(self, allow_signed: bool) -> Fraction:
        self.take("^")
        sign = 1
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        if self.peek()[1] == "-":
            if not allow_signed:
                raise ParseError("negative exponents are only allowed on q")
            self.take()
            sign = -1
        kind, val = self.take()
        if kind != "num":
            raise ParseError(f"expected exponent, found {val!r}")
        e = Fraction(val)
        if self.peek()[1] == "/":
            self.take()
            kind, den = self.take()
            if kind != "num":
                raise ParseError("bad fractional exponent")
            e = e / Fraction(den)
        if paren:
            self.take(")")
        return sign * e

    def atom(self) -> QPolynomial:
        kind, val = self.take()
        if kind == "num":
            c = Fraction(val)
            if self.peek()[1] == "/":
                self.take()
                kind2, den = self.take()
                if kind2 != "num":
                    raise ParseError("bad rational literal")
                c = c / Fraction(den)
            return QPolynomial.scalar(c)
        if kind == "name":
            return _atom_value(val)
        if val == "(":
            out = self.expr()
            self.take(")")
            return out
        raise ParseError(f"unexpected token {val!r}")


def parse(text: str) -> QPolynomial:
    if not text.strip():
        raise ParseError("empty expression")
    p = _Parser(tokenize(text))
    out = p.expr()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input at token {p.toks[p.i][1]!r}")
    return out
