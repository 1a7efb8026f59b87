"""Laurent polynomials in q^(1/2) with rational coefficients.

Exponents are stored in half-units: the key ``e`` stands for ``q**(e/2)``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterator, Mapping, Tuple, Union

Number = Union[int, Fraction]


class LaurentScalar:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | None = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if not isinstance(e, int):
                    raise TypeError(f"half-exponent must be int, got {e!r}")
                c = Fraction(c)
                if c:
                    clean[e] = clean.get(e, Fraction(0)) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, c: Number) -> "LaurentScalar":
        return cls({0: c})

    @classmethod
    def qpow(cls, half_exp: int, coeff: Number = 1) -> "LaurentScalar":
        """``coeff * q**(half_exp/2)``."""
        return cls({half_exp: coeff})

    @classmethod
    def coerce(cls, x) -> "LaurentScalar":
        if isinstance(x, LaurentScalar):
            return x
        if isinstance(x, (int, Rational)):
            return cls.const(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentScalar")

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        try:
            other = LaurentScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentScalar({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = LaurentScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return LaurentScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = LaurentScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentScalar(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            # only monomials are invertible
            if isinstance(n, int) and len(self._terms) == 1:
                (e, c), = self._terms.items()
                return LaurentScalar({e * n: c ** n})
            raise ValueError("negative powers only exist for monomials")
        out = LaurentScalar.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, half_exp: int) -> "LaurentScalar":
        """Multiply by ``q**(half_exp/2)``."""
        if not half_exp:
            return self
        return LaurentScalar({e + half_exp: c for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentScalar):
            return self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == LaurentScalar.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -------------------------------------------------------

    def evaluate(self, q: float) -> float:
        """Numeric value at ``q > 0``; terms summed in increasing exponent order."""
        if q <= 0:
            raise ValueError("q must be positive")
        r = q ** 0.5
        return float(sum(float(c) * r ** e for e, c in sorted(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            if e == 0:
                mono = ""
            elif e % 2 == 0:
                mono = "q" if e == 2 else f"q^{e // 2}"
            else:
                mono = f"q^({e}/2)"
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


ZERO = LaurentScalar()
ONE = LaurentScalar.const(1)
