import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from evoalg.scalars import Surd, cbrt, exact_root, parse_scalar, real_root, sign, sqrt

F = Fraction


def test_exact_root_rational_and_irrational():
    assert exact_root(F(8, 27), 3) == F(2, 3)
    assert exact_root(F(2), 2) is None


def test_sqrt_and_cbrt_stay_exact():
    assert sqrt(F(9, 4)) == F(3, 2)
    r = sqrt(F(2))
    assert isinstance(r, Surd)
    assert r * r == 2
    c = cbrt(F(-2))
    assert c**3 == -2
    assert math.isclose(float(c), -(2 ** (1 / 3)), rel_tol=1e-15)


def test_radical_sums_cancel_exactly():
    a, b = sqrt(F(2)), cbrt(F(2))
    assert (a + b) - b - a == 0
    assert a * b != b * b
    assert (a * b) ** 6 == 32  # 2^3 * 2^2


def test_sign_of_multi_term_value():
    x = sqrt(F(2)) - F(141, 100)
    assert sign(x) == 1
    assert sign(-x) == -1


def test_root_outside_extension_raises():
    with pytest.raises(ArithmeticError):
        real_root(sqrt(F(2)) + 1, 2)
    with pytest.raises(ValueError):
        sqrt(F(-1))


def test_float_cbrt_is_sign_preserving():
    assert cbrt(-27.0) == -3.0
    assert sqrt(2.0) == math.sqrt(2.0)


@pytest.mark.parametrize(
    "text, value",
    [("3", F(3)), ("-1/4", F(-1, 4)), ("0.5", 0.5), (" 7 ", F(7))],
)
def test_parse_scalar(text, value):
    got = parse_scalar(text)
    assert got == value and type(got) is type(value)


@pytest.mark.parametrize("text", ["", "abc", "1/0", "inf", "nan"])
def test_parse_scalar_rejects(text):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(text)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=30))
def test_cbrt_cubes_back(q):
    assert cbrt(q) ** 3 == q


@given(
    st.fractions(min_value=0, max_value=50, max_denominator=30),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
)
def test_surd_arithmetic_matches_floats(q, c):
    r = sqrt(q)
    value = c * r + cbrt(q) - r * r
    assert math.isclose(float(value), c * math.sqrt(q) + float(q) ** (1 / 3) - float(q),
                        rel_tol=1e-12, abs_tol=1e-12)
