from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanring.scalars import (DivisionByZero, LaurentPolynomial, PrimeField, RationalFunction,
                               field_arith, laurent_coeff, parse_field, parse_laurent, valuation)


def test_characteristic_two():
    assert field_arith(parse_field("F2"), 1, 1, "add") == 0


def test_rational_inverse():
    Q = parse_field("Q")
    assert field_arith(Q, Fraction(3, 4), None, "inv") == Fraction(4, 3)


def test_rational_function_product_mod_5():
    # (x+1)(x+4) = x^2 + 5x + 4 = x^2 + 4 over F5
    F = parse_field("F5(x)")
    got = field_arith(F, F.parse("x+1"), F.parse("x+4"), "mul")
    assert got == F.parse("x^2+4")


def test_division_by_zero_is_an_error_not_a_crash():
    Q = parse_field("Q")
    with pytest.raises(DivisionByZero):
        field_arith(Q, Q.zero, None, "inv")
    with pytest.raises(ZeroDivisionError):
        parse_field("F7").inv(0)


@pytest.mark.parametrize("text,k,expected", [
    ("1/(1-t)", 7, 1),
    ("t^-1", -1, 1),
    ("t^-1", 0, 0),
    ("t/(1-t)^2", 3, 3),
])
def test_laurent_coefficients(text, k, expected):
    Q = parse_field("Q(t)")
    assert laurent_coeff(Q.parse(text), k) == expected


def test_valuations():
    Q = parse_field("Q")
    Qt = parse_field("Q(t)")
    assert valuation(parse_laurent("t^-1 + 1", Q)) == -1
    assert valuation(Qt.parse("(t^2+t^3)/(1+t)")) == 2
    assert valuation(Qt.zero) == float("inf")


def test_canonical_form_monic_coprime():
    F = parse_field("Q(t)")
    f = F.parse("(2*t^2 - 2)/(4*t - 4)")
    assert f == F.parse("(t+1)/2")
    assert f.den[-1] == 1
    again = RationalFunction(F.base, f.num, f.den)
    assert again == f


def test_laurent_polynomial_ring_ops():
    F = PrimeField(3)
    f = LaurentPolynomial(F, {-1: 1, 2: 2})
    assert (f - f).is_zero()
    assert f * LaurentPolynomial.monomial(F, 1) == LaurentPolynomial(F, {0: 1, 3: 2})
    assert f.valuation() == -1 and f.degree() == 2


small_poly = st.lists(st.integers(-3, 3), min_size=1, max_size=4)


def _rf(F, num, den):
    if not any(den):
        den = [1]
    return F.make(tuple(F.base.coerce(c) for c in num), tuple(F.base.coerce(c) for c in den))


@settings(max_examples=60, deadline=None)
@given(small_poly, small_poly, small_poly, small_poly)
def test_laurent_coeff_of_product_is_convolution(n1, d1, n2, d2):
    F = parse_field("Q(t)")
    f, g = _rf(F, n1, d1), _rf(F, n2, d2)
    if f.is_zero() or g.is_zero():
        return
    vf, vg = valuation(f), valuation(g)
    fg = F.mul(f, g)
    for k in range(vf + vg, vf + vg + 5):
        conv = sum(laurent_coeff(f, i) * laurent_coeff(g, k - i) for i in range(vf, k - vg + 1))
        assert laurent_coeff(fg, k) == conv


@settings(max_examples=60, deadline=None)
@given(small_poly, small_poly)
def test_coefficients_vanish_below_valuation(num, den):
    F = parse_field("F5(t)")
    f = _rf(F, num, den)
    if f.is_zero():
        return
    v = valuation(f)
    assert laurent_coeff(f, v) != 0
    assert all(laurent_coeff(f, k) == 0 for k in range(v - 4, v))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_prime_field_axioms(x, y, z):
    F = parse_field("F7")
    x, y, z = F.coerce(x), F.coerce(y), F.coerce(z)
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    if x:
        assert F.mul(x, F.inv(x)) == 1


@settings(max_examples=60, deadline=None)
@given(small_poly, small_poly)
def test_canonical_form_idempotent(num, den):
    F = parse_field("F7(t)")
    f = _rf(F, num, den)
    again = F.make(f.num, f.den)
    assert again == f and (again.num, again.den) == (f.num, f.den)
