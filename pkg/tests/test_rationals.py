import math
from fractions import Fraction

import mpmath
import pytest

from smallcancel.rationals import (AffineFn, TableFn, ceil_frac,
                                   cmp_linear_sqrt, e4_bounds, floor_frac,
                                   format_fraction, iroot, isqrt_frac_ge,
                                   parse_fraction, pow_frac_bounds)


def test_parse_format_roundtrip():
    for text in ["1/3", "-7/2", "5", "0"]:
        f = parse_fraction(text)
        assert parse_fraction(format_fraction(f)) == f
    assert parse_fraction("0.25") == Fraction(1, 4)


def test_ceil_floor():
    for num in range(-20, 21):
        for den in range(1, 7):
            x = Fraction(num, den)
            assert ceil_frac(x) == math.ceil(x)
            assert floor_frac(x) == math.floor(x)


def test_iroot_against_bounds():
    for n in [0, 1, 7, 26, 27, 28, 10 ** 18, 10 ** 18 + 1]:
        for k in [1, 2, 3, 5]:
            r = iroot(n, k)
            assert r ** k <= n < (r + 1) ** k
    with pytest.raises(ValueError):
        iroot(-1, 2)


def test_e4_bounds_enclose_mpmath():
    mpmath.mp.dps = 60
    true = mpmath.e ** 4
    lo, hi = e4_bounds()
    assert mpmath.mpf(lo.numerator) / lo.denominator <= true
    assert mpmath.mpf(hi.numerator) / hi.denominator >= true
    assert hi - lo < Fraction(1, 10 ** 20)


def test_pow_frac_bounds_enclose_mpmath():
    mpmath.mp.dps = 80
    cases = [(Fraction(3), Fraction(13, 2)), (Fraction(12), Fraction(32)),
             (Fraction(7, 2), Fraction(5, 3)), (Fraction(2), Fraction(1, 7))]
    for base, exp in cases:
        lo, hi = pow_frac_bounds(base, exp)
        true = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                            mpmath.mpf(exp.numerator) / exp.denominator)
        assert mpmath.mpf(lo.numerator) / lo.denominator <= true
        assert mpmath.mpf(hi.numerator) / hi.denominator >= true
    # integer exponents are exact
    lo, hi = pow_frac_bounds(Fraction(5, 3), Fraction(4))
    assert lo == hi == Fraction(5, 3) ** 4


def test_affine_fn():
    f = AffineFn(Fraction(1, 3), Fraction(2))
    assert f(Fraction(9)) == Fraction(5)
    assert "1/3" in f.describe()


def test_table_fn_interpolation_and_errors():
    f = TableFn({2: 1, 4: 3})
    assert f(Fraction(0)) == 0
    assert f(Fraction(1)) == Fraction(1, 2)
    assert f(Fraction(3)) == 2
    assert f(Fraction(4)) == 3
    assert f.max_arg() == 4
    with pytest.raises(ValueError):
        f(Fraction(5))
    with pytest.raises(ValueError):
        f(Fraction(-1))
    with pytest.raises(ValueError):
        TableFn({1: 3, 2: 1})
    with pytest.raises(ValueError):
        TableFn({})


def test_cmp_linear_sqrt_against_mpmath():
    mpmath.mp.dps = 50
    cases = [(Fraction(3), Fraction(1), Fraction(0), 8),
             (Fraction(2), Fraction(1), Fraction(0), 4),
             (Fraction(1), Fraction(1), Fraction(0), 4),
             (Fraction(7, 2), Fraction(1, 3), Fraction(1), 49),
             (Fraction(-1), Fraction(1), Fraction(0), 2),
             (Fraction(5), Fraction(0), Fraction(5), 99)]
    for lhs, a, b, d in cases:
        got = cmp_linear_sqrt(lhs, a, b, d)
        rhs = a * mpmath.sqrt(d) + b
        diff = mpmath.mpf(lhs.numerator) / lhs.denominator - rhs
        want = 0 if abs(diff) < mpmath.mpf("1e-30") else (1 if diff > 0 else -1)
        assert got == want, (lhs, a, b, d)


def test_isqrt_frac_ge():
    assert isqrt_frac_ge(Fraction(3), 9)
    assert isqrt_frac_ge(Fraction(3), 8)
    assert not isqrt_frac_ge(Fraction(3), 10)
    assert isqrt_frac_ge(Fraction(0), 0)
    assert not isqrt_frac_ge(Fraction(-1), 1)
