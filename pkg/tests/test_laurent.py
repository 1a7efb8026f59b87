from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from podles.laurent import ONE, ZERO, LaurentScalar

# evaluation at a rational point of q^(1/2) is a ring map into Q: exact oracle
T = Fraction(3, 7)


def at(x: LaurentScalar, t: Fraction = T) -> Fraction:
    return sum((c * t ** e for e, c in x.items()), Fraction(0))


scalars = st.dictionaries(
    st.integers(-6, 6),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    max_size=4,
).map(LaurentScalar)


@given(scalars, scalars)
def test_ring_operations_commute_with_evaluation(x, y):
    assert at(x + y) == at(x) + at(y)
    assert at(x * y) == at(x) * at(y)
    assert at(x - y) == at(x) - at(y)
    assert at(-x) == -at(x)


@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + ZERO == x and x * ONE == x


@given(scalars)
def test_no_zero_coefficients_stored(x):
    assert all(c != 0 for _, c in x.items())
    assert (x - x).is_zero()


@given(scalars, st.integers(0, 4))
def test_power(x, n):
    assert at(x ** n) == at(x) ** n


def test_negative_power_of_monomial():
    m = LaurentScalar.qpow(3, Fraction(2, 5))
    assert m ** -1 * m == ONE
    with pytest.raises(ValueError):
        (ONE + LaurentScalar.qpow(2)) ** -1


def test_shift_is_multiplication_by_half_powers():
    x = LaurentScalar({0: 1, 2: -3})
    assert x.shift(1) == x * LaurentScalar.qpow(1)
    assert x.shift(0) is x


def test_numeric_evaluation():
    x = LaurentScalar({-1: 2, 4: Fraction(1, 2)})
    q = 0.36
    assert x.evaluate(q) == pytest.approx(2 / 0.6 + 0.5 * q * q, rel=1e-15)
    with pytest.raises(ValueError):
        x.evaluate(0.0)


def test_coerce_and_equality():
    assert LaurentScalar.coerce(3) == 3
    assert LaurentScalar.coerce(Fraction(1, 2)) == LaurentScalar.const(Fraction(1, 2))
    with pytest.raises(TypeError):
        LaurentScalar.coerce(0.5)
    assert hash(LaurentScalar({1: 2})) == hash(LaurentScalar({1: 2}))


def test_repr():
    assert repr(ZERO) == "0"
    assert repr(LaurentScalar({0: 1, 2: -1, -1: 3})) == "3*q^(-1/2) + 1 - q"
