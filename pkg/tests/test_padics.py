import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from adickit.norms import ExactNorm
from adickit.padics import (PadicNumber, PrecisionLossError,
                            PrimeMismatchError, padic_arith,
                            rational_valuation)


def test_two_plus_two():
    a = PadicNumber.approximate(2, valuation=1, unit=1, precision=8)
    s = a + a
    assert s.valuation == 2
    assert s.unit_mod(1) == 1
    # absolute precision is min(1+8, 1+8) = 9, so 7 relative digits remain
    assert s.rel_precision == 7


def test_mul_identity_random():
    rng = random.Random(7)
    one = PadicNumber.one(3)
    for _ in range(20):
        x = PadicNumber.exact(Fraction(rng.randint(-50, 50) or 1,
                                       rng.randint(1, 40)), 3)
        assert (x * one).rational_rep() == x.rational_rep()


def test_inverse_of_three_mod_sixteen():
    # oracle: extended Euclid mod 2^4
    oracle = pow(3, -1, 16)
    assert oracle == 11 and (3 * oracle) % 16 == 1
    d = PadicNumber.exact(1, 2) / PadicNumber.exact(3, 2)
    assert d.valuation == 0
    assert d.unit_mod(4) == oracle
    # the approximate layer agrees
    approx = PadicNumber.approximate(2, 0, 1, 4) / PadicNumber.approximate(2, 0, 3, 4)
    assert approx.valuation == 0 and approx.unit_mod(4) == oracle


def test_division_by_exact_zero():
    with pytest.raises(ZeroDivisionError):
        PadicNumber.one(2) / PadicNumber.zero(2)


def test_prime_mismatch():
    with pytest.raises(PrimeMismatchError):
        PadicNumber.one(2) + PadicNumber.one(3)


def test_precision_loss_is_loud():
    a = PadicNumber.approximate(2, 0, 3, 4)
    with pytest.raises(PrecisionLossError):
        a - a
    # exact cancellation is fine: the zero is provable
    e = PadicNumber.exact(Fraction(3), 2)
    assert (e - e).is_zero


def test_norms():
    assert PadicNumber.exact(4, 2).norm() == ExactNorm.power(2, -2)
    assert PadicNumber.exact(Fraction(1, 2), 2).norm() == ExactNorm.power(2, 1)
    assert PadicNumber.zero(5).norm().is_zero


rationals = st.fractions(min_value=-99, max_value=99, max_denominator=30)


@given(rationals, rationals)
def test_ultrametric(a, b):
    p = 3
    x, y = PadicNumber.exact(a, p), PadicNumber.exact(b, p)
    s = x + y
    assert s.norm() <= max(x.norm(), y.norm())
    if x.norm() != y.norm():
        assert s.norm() == max(x.norm(), y.norm())


@given(rationals, rationals)
def test_multiplicativity(a, b):
    p = 5
    x, y = PadicNumber.exact(a, p), PadicNumber.exact(b, p)
    assert (x * y).norm() == x.norm() * y.norm()


def test_padic_arith_dispatch():
    a = PadicNumber.exact(6, 2)
    b = PadicNumber.exact(2, 2)
    assert padic_arith("add", a, b).rational_rep() == 8
    assert padic_arith("sub", a, b).rational_rep() == 4
    assert padic_arith("mul", a, b).rational_rep() == 12
    assert padic_arith("div", a, b).rational_rep() == 3
    with pytest.raises(ValueError):
        padic_arith("pow", a, b)


def test_rational_valuation():
    assert rational_valuation(Fraction(12), 2) == 2
    assert rational_valuation(Fraction(1, 8), 2) == -3
    assert rational_valuation(Fraction(9, 5), 3) == 2
