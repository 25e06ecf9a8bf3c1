import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, strategies as st

from dirmix.scalar import Surd, as_scalar, ceil, floor, format_scalar, frac, parse_scalar, sign, sqrt, surd

mpmath.mp.prec = 200

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 13])


def mp_value(x):
    if isinstance(x, Surd):
        return mpmath.mpf(x.p.numerator) / x.p.denominator + (
            mpmath.mpf(x.r.numerator) / x.r.denominator
        ) * mpmath.sqrt(x.d)
    return mpmath.mpf(x.numerator) / x.denominator


def test_collapse_to_rational():
    assert surd(F(1, 2), 0, 5) == F(1, 2)
    assert isinstance(surd(1, 3, 0), F)
    assert sqrt(F(9, 4)) == F(3, 2)
    assert sqrt(8) == surd(0, 2, 2)


def test_parse_and_format_roundtrip():
    for text in ["3/7", "1/2 + 3/4*sqrt(5)", "(1+sqrt(5))/2", "-sqrt(2)", "0.1", "2**3"]:
        x = parse_scalar(text)
        assert parse_scalar(format_scalar(x)) == x
    assert parse_scalar("0.1") == F(1, 10)
    assert format_scalar(parse_scalar("3/2 - sqrt(2)")) == "3/2 - 1*sqrt(2)"


@pytest.mark.parametrize("bad", ["", "x", "sqrt(sqrt(2))", "2**-1", "__import__('os')", "1/0"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(bad)


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)


def test_known_signs():
    # 7 - 5*sqrt(2) ~ -0.071
    assert sign(7 - 5 * sqrt(2)) == -1
    assert sign(99 - 70 * sqrt(2)) == 1
    assert floor(sqrt(2) * 10**6) == 1414213
    assert ceil(-sqrt(2)) == -1
    assert frac(-sqrt(2)) == 2 - sqrt(2)


@given(rationals, rationals, radicands)
def test_sign_agrees_with_200_bit_evaluation(p, r, d):
    x = surd(p, r, d)
    v = mp_value(x)
    if abs(v) > mpmath.mpf(2) ** -100:
        assert sign(x) == (1 if v > 0 else -1)


@given(rationals, rationals, radicands, st.integers(-1000, 1000))
def test_floor_agrees_with_200_bit_evaluation(p, r, d, n):
    x = surd(p, r, d) * n
    v = mp_value(x)
    if abs(v - mpmath.floor(v)) > mpmath.mpf(2) ** -100:
        assert floor(x) == int(mpmath.floor(v))


@given(rationals, rationals, rationals, rationals, radicands)
def test_field_arithmetic(a, b, c, e, d):
    x, y = surd(a, b, d), surd(c, e, d)
    assert (x + y) - y == x
    assert (x * y) == surd(a * c + b * e * d, a * e + b * c, d)
    if y != 0:
        assert (x / y) * y == x
    assert math.isclose(float(x * y), float(x) * float(y), rel_tol=1e-9, abs_tol=1e-9)
