from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ssc_gamma.padic_core import (
    INF, FieldDescriptor, MeasureValue, PAdicNumber, PrecisionError, ValuationAtLeast,
    abs_value, measure_ball, measure_one_plus_mult, measure_units_mult, square_class,
    square_class_mul, units_mod, val,
)

PRIMES = [2, 3, 5, 7]
nonzero = st.builds(lambda n, d, e: F(n, d) * F(3) ** e,
                    st.integers(1, 500).map(lambda n: n if n % 2 else -n),
                    st.integers(1, 50), st.integers(-4, 4))


def test_valuation_examples():
    assert val(3, 3) == 1
    assert val(F(1, 3), 3) == -1
    assert val(0, 3) == INF


def test_inexact_zero_sentinel():
    f = FieldDescriptor(3, 4)
    a = PAdicNumber.from_rational(1, f)
    b = PAdicNumber.from_rational(1 + 3 ** 4, f)
    d = a - b
    assert d.is_zero() and not d.is_exact_zero()
    assert d.valuation() == ValuationAtLeast(4)
    with pytest.raises(PrecisionError):
        d.inverse()


def test_abs_examples():
    q = 3
    assert abs_value(3, 3).equals(MeasureValue(F(1), -2), q)
    assert abs_value(2, 3).equals(MeasureValue(F(1)), q)
    # gamma = -4 alpha with alpha a unit: |gamma/4| = 1
    assert abs_value(F(-4 * 2, 4), 3).equals(MeasureValue(F(1)), q)
    assert abs_value(0, 3).coeff == 0


def test_measures():
    q = 3
    assert measure_ball(0).equals(MeasureValue(F(1), 1), q)
    assert measure_ball(1).equals(MeasureValue(F(1), -1), q)
    assert measure_one_plus_mult(q).equals(MeasureValue(F(1, q - 1)), q)
    assert measure_units_mult(q).equals(MeasureValue(F(1)), q)
    for v in range(-3, 4):
        assert measure_ball(v).equals(measure_ball(v + 1) * q, q)


def test_square_class_examples():
    assert square_class(1, 3) == "1"
    assert square_class(2, 3) == "u"
    for p in (3, 5, 7):
        assert square_class(p, p) == "pi"


@pytest.mark.parametrize("p", PRIMES)
def test_square_class_homomorphism(p):
    reps = [u * p ** e for u in units_mod(p, 3) for e in (0, 1)]
    classes = {square_class(x, p) for x in reps}
    assert len(classes) == (8 if p == 2 else 4)
    for x in reps[:: max(1, len(reps) // 12)]:
        for y in reps[:: max(1, len(reps) // 12)]:
            assert square_class(x * y, p) == square_class_mul(square_class(x, p), square_class(y, p), p)


@given(nonzero, nonzero)
def test_valuation_laws(x, y):
    p = 3
    assert val(x * y, p) == val(x, p) + val(y, p)
    if x + y != 0:
        assert val(x + y, p) >= min(val(x, p), val(y, p))
        if val(x, p) != val(y, p):
            assert val(x + y, p) == min(val(x, p), val(y, p))


@given(nonzero, nonzero)
def test_abs_multiplicative_ultrametric(x, y):
    q = 3
    ax, ay = abs_value(x, 3), abs_value(y, 3)
    assert abs_value(x * y, 3).equals(ax * ay, q)
    if x + y != 0:
        assert abs_value(x + y, 3).at(q) <= max(ax.at(q), ay.at(q)) + 1e-12


@given(nonzero, nonzero)
def test_padic_arithmetic_matches_rationals(x, y):
    f = FieldDescriptor(3, 10)
    a, b = PAdicNumber.from_rational(x, f), PAdicNumber.from_rational(y, f)
    assert a * b == PAdicNumber.from_rational(x * y, f)
    assert a / b == PAdicNumber.from_rational(x / y, f)
    s = a + b
    if not s.is_zero() and val(x + y, 3) < s.abs_prec:
        assert s.valuation() == val(x + y, 3)


def test_field_descriptor_validation():
    with pytest.raises(ValueError):
        FieldDescriptor(4)
    with pytest.raises(ValueError):
        FieldDescriptor(3, 1)
    assert FieldDescriptor(5).q == 5
