from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from singcubic.cyclo import (
    CycNum,
    cyc_add,
    cyc_inv,
    cyc_lift,
    cyc_make,
    cyc_mul,
    cyclotomic_polynomial,
    sqrt_in_field,
    totient,
)

from .conftest import ZETA, cyc_to_sympy, cycnums, sympy_vanishes

Z3, Z4 = CycNum.zeta(3), CycNum.zeta(4)


# --- construction ------------------------------------------------------


def test_make_reduces_modulo_cyclotomic_polynomial():
    assert cyc_make(3, [(2, 1)]) == cyc_make(3, [(0, -1), (1, -1)])
    assert cyc_make(4, [(2, 1)]) == CycNum.rational(-1)
    assert cyc_make(12, [(4, 1)]) == cyc_lift(Z3, 12)


def test_make_rejects_nonpositive_conductor():
    with pytest.raises(ValueError):
        cyc_make(0, [(0, 1)])
    with pytest.raises(ValueError):
        cyc_make(-3, [(0, 1)])


def test_conductors_one_and_two_are_rational():
    assert CycNum.zeta(1).is_one()
    assert CycNum.zeta(2) == CycNum.rational(-1)
    assert CycNum.zeta(2).is_rational()


@pytest.mark.parametrize("n", [1, 3, 4, 5, 7, 8, 9, 12, 15, 20])
def test_cyclotomic_polynomial_matches_sympy(n):
    ours = cyclotomic_polynomial(n)
    theirs = sympy.Poly(sympy.cyclotomic_poly(n, ZETA), ZETA).all_coeffs()[::-1]
    assert list(ours) == [int(c) for c in theirs]
    assert len(ours) - 1 == totient(n)


@pytest.mark.parametrize("n", [3, 4, 5, 12, 20])
def test_coefficient_vector_has_totient_length(n):
    x = cyc_make(n, [(k, k + 1) for k in range(n)])
    assert x.n == n and len(x.coeffs) == totient(n)


# --- arithmetic ----------------------------------------------------------


def test_spec_products_and_inverses():
    assert cyc_mul(1 + Z3, 1 + Z3**2) == CycNum.rational(1)
    assert cyc_inv(Z3) == -1 - Z3
    assert Z3**3 == CycNum.rational(1)
    assert Z4**2 == -1


def test_mixed_conductor_sum_lands_in_lcm():
    total = cyc_add(Z3, Z4)
    assert total.n == 12
    # zeta12^4 + zeta12^3 reduced by x^4 - x^2 + 1 by hand: x^4 = x^2 - 1
    assert total == cyc_make(12, [(2, 1), (0, -1), (3, 1)])


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        cyc_inv(CycNum.rational(0))


@settings(max_examples=60, deadline=None)
@given(cycnums(), cycnums(), cycnums())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == CycNum.rational(0)
    if not a.is_zero():
        assert a * a.inverse() == CycNum.rational(1)


@settings(max_examples=60, deadline=None)
@given(cycnums(), cycnums())
def test_product_agrees_with_sympy(a, b):
    n = 12
    prod = a * b
    assert sympy_vanishes(cyc_to_sympy(prod, n) - cyc_to_sympy(a, n) * cyc_to_sympy(b, n), n)


@settings(max_examples=40, deadline=None)
@given(cycnums())
def test_inverse_agrees_with_sympy(a):
    if a.is_zero():
        return
    n = 12
    assert sympy_vanishes(cyc_to_sympy(a.inverse(), n) * cyc_to_sympy(a, n) - 1, n)


@settings(max_examples=60, deadline=None)
@given(cycnums(), cycnums())
def test_equality_is_decided_by_canonical_form(a, b):
    assert (a == b) == (a - b).is_zero()
    if a == b:
        assert hash(a) == hash(b)


# --- lifting --------------------------------------------------------------


def test_lift_examples():
    assert cyc_lift(Z3, 12) == CycNum.zeta(12, 4)
    assert cyc_lift(CycNum.rational(Fraction(5, 3)), 4) == CycNum.rational(Fraction(5, 3))
    assert cyc_lift(Z4, 12) == CycNum.zeta(12, 3)


def test_lift_requires_divisibility():
    with pytest.raises(ValueError):
        cyc_lift(Z3, 4)


@settings(max_examples=60, deadline=None)
@given(cycnums((1, 3, 4)), cycnums((1, 3, 4)), st.sampled_from([12, 24, 60]))
def test_lift_is_ring_homomorphism(a, b, m):
    assert cyc_lift(a * b, m) == cyc_lift(a, m) * cyc_lift(b, m)
    assert cyc_lift(a + b, m) == cyc_lift(a, m) + cyc_lift(b, m)
    # lifting then reducing back is the identity
    assert cyc_lift(a, m) == a


# --- display and square roots ----------------------------------------------


def test_text_uses_zeta_notation():
    assert str(Z3) == "zeta(3)"
    assert str(-1 - Z3) == "-1 - zeta(3)"
    assert str(CycNum.rational(Fraction(-2, 3))) == "-2/3"


def test_square_roots_inside_the_field():
    r = sqrt_in_field(CycNum.rational(-1), 4)
    assert r is not None and r * r == -1
    r = sqrt_in_field(CycNum.rational(-3), 12)
    assert r is not None and r * r == -3
    assert sqrt_in_field(CycNum.rational(2), 4) is None


@pytest.mark.parametrize("value, conductor", [(5, 5), (2, 8), (-2, 8), (3, 12), (-15, 15), (Fraction(-3, 4), 3)])
def test_square_roots_via_gauss_sums(value, conductor):
    a = CycNum.rational(value)
    r = sqrt_in_field(a, conductor)
    assert r is not None and r * r == a


def test_square_root_of_root_of_unity():
    r = sqrt_in_field(Z3, 3)
    assert r is not None and r * r == Z3
