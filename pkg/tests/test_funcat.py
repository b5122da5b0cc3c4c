import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nevkit import funcat
from nevkit.funcat import (
    CatalogError, ExpOf, ExpPoly, Gamma, IntPow, Pole, Quotient, Rational,
    ReciprocalGamma, Saturated, Shift, Tan, divisors_within, evaluate, normalize_origin,
    parse_function, shift,
)

HALF_PI = math.pi / 2


def test_evaluate_identity():
    assert evaluate(Rational((1, 0)), 2) == 2 + 0j


def test_gamma_at_one():
    assert abs(evaluate(Gamma(), 1) - 1) < 1e-14


def test_tan_pole():
    assert evaluate(Tan(HALF_PI), 1) == Pole(1)


def test_rational_zero_and_pole_markers():
    f = Rational((1, -3), (1, 2, 1))
    assert evaluate(f, 3) == 0
    assert evaluate(f, -1) == Pole(2)


def test_saturation_flag():
    v = evaluate(ExpOf(ExpPoly((1, 0))), 7.0)
    assert isinstance(v, Saturated)
    assert abs(v.log_abs - math.exp(7.0)) < 1e-9
    assert math.isfinite(abs(v.value))


def test_removable_point_in_quotient():
    # sin-type cancellation: (z-1)/(z-1) through a Quotient of two rationals
    f = Quotient(Rational((1, -1)), Rational((2, -2)))
    assert abs(evaluate(f, 1) - 0.5) < 1e-12


def test_gamma_reciprocal_consistency():
    z = 2.3 - 1.1j
    assert abs(evaluate(Gamma(), z) * evaluate(ReciprocalGamma(), z) - 1) < 1e-12
    assert evaluate(ReciprocalGamma(), -3) == 0


def test_exppoly_has_empty_divisor():
    assert divisors_within(ExpPoly((1, 0, 0)), 10, "pole").points == ()
    assert divisors_within(ExpPoly((1, 0, 0)), 10, "zero").points == ()


def test_gamma_poles():
    d = divisors_within(Gamma(), 3.5, "pole")
    assert [loc for loc, _ in d] == [0, -1, -2, -3]
    assert all(m == 1 for _, m in d)
    assert divisors_within(Gamma(), 3.5, "zero").points == ()


def test_rational_double_pole():
    d = divisors_within(Rational((1, -3), (1, 2, 1)), 4, "pole")
    assert len(d) == 1
    loc, m = d.points[0]
    assert abs(loc + 1) < 1e-6 and m == 2


def test_divisor_sorting_and_open_disc():
    f = Tan(HALF_PI)
    zeros = divisors_within(f, 4, "zero")
    assert [round(loc.real) for loc, _ in zeros] == [0, 2, -2]
    assert divisors_within(f, 4, "zero", closed=True).degree == 5


def test_common_roots_cancel():
    f = Rational((1, -1, -2), (1, 1))  # (z-2)(z+1)/(z+1)
    assert f.poles == ()
    assert len(f.zeros) == 1 and abs(f.zeros[0][0] - 2) < 1e-12


def test_zero_denominator_rejected():
    with pytest.raises(CatalogError):
        Rational((1,), (0, 0))


def test_expof_needs_entire_inner():
    with pytest.raises(CatalogError):
        ExpOf(Gamma())
    ExpOf(ReciprocalGamma())


def test_intpow_zero_rejected():
    with pytest.raises(CatalogError):
        IntPow(Gamma(), 0)


def test_normalize_origin_examples():
    g, p = normalize_origin(Rational((1, 0, 0)))
    assert p == -2 and isinstance(g, Rational) and abs(evaluate(g, 0.7) - 1) < 1e-14
    g, p = normalize_origin(Gamma())
    assert p == 1 and abs(evaluate(g, 0) - 1) < 1e-10
    f = Rational((1, -3), (1, 1))
    assert normalize_origin(f) == (f, 0)


def test_shift_collapses():
    f = Gamma()
    assert shift(shift(f, 1), 2) == Shift(f, 3)
    assert shift(f, 0) is f
    assert abs(evaluate(shift(f, 1), 1) - 1) < 1e-14


@pytest.mark.parametrize("text", [
    "gamma", "rgamma", "exppoly[1,0,0]", "tan[1.5707963267948966,0]", "rat[1,-3]/[1,1]",
    "shift(gamma,1)", "mul(rat[1,0],gamma)", "div(gamma,shift(gamma,1+2i))", "pow(tan[1],-2)",
    "exp(exppoly[1,0])",
])
def test_text_round_trip(text):
    f = parse_function(text)
    assert parse_function(f.to_text()) == f


@pytest.mark.parametrize("text", ["gama", "rat[1,", "pow(gamma,1.5)", "tan[1,2,3]", "gamma x"])
def test_text_errors(text):
    with pytest.raises(CatalogError):
        parse_function(text)


CATALOG = [
    Rational((1, -3), (1, 2, 1)), Rational((2, 1j, -1), (1, 0.5, 0, 4)), Tan(HALF_PI), Tan(1 + 0.2j, 0.3),
    Gamma(), ReciprocalGamma(), ExpPoly((1, 0, 1)), shift(Gamma(), 0.5 + 0.5j),
    Quotient(shift(Tan(HALF_PI), 1), Tan(HALF_PI)), IntPow(Rational((1, -2j)), -2),
]


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.to_text())
def test_divisor_evaluation_consistency(f):
    R = 4.5
    for kind in ("zero", "pole"):
        for loc, _ in divisors_within(f, R, kind):
            w = loc + 1e-7 * cmath.exp(0.7j)
            v = funcat.evaluate(f, w)
            scale = abs(funcat.evaluate(f, loc + 0.3))
            if kind == "pole":
                assert isinstance(v, Pole) or abs(v) > 1e6 * min(scale, 1.0)
            else:
                assert abs(v) < 1e-6 * max(scale, 1.0)


def _argument_principle(f, R, n=4096):
    theta = 2 * np.pi * (np.arange(n) + 0.5) / n
    z = R * np.exp(1j * theta)
    h = 1e-6 * R
    vals = lambda w: np.exp(f.log_value(w))
    dlog = (vals(z + h) - vals(z - h)) / (2 * h) / vals(z)
    return (dlog * 1j * z).sum() * (2 * np.pi / n) / (2j * np.pi)


@pytest.mark.parametrize("f", [c for c in CATALOG[:4]], ids=lambda f: f.to_text())
@pytest.mark.parametrize("R", [1.55, 3.3])
def test_argument_principle(f, R):
    got = _argument_principle(f, R)
    expect = divisors_within(f, R, "zero").degree - divisors_within(f, R, "pole").degree
    assert abs(got - expect) < 0.25
    assert round(got.real) == expect


def _random_rational(rng):
    k, l = rng.integers(0, 4, size=2)
    roots = lambda n: 3 * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
    num = np.poly(roots(k)) if k else np.array([1.0])
    den = np.poly(roots(l)) if l else np.array([1.0])
    return Rational(tuple(num), tuple(den))


def test_quotient_divisor_merge():
    rng = np.random.default_rng(7)
    for _ in range(50):
        f, g = _random_rational(rng), _random_rational(rng)
        q = Quotient(f, g)
        got = funcat.signed_divisor(q, 10)
        expect = funcat._merge(funcat.signed_divisor(f, 10) + [(a, -m) for a, m in funcat.signed_divisor(g, 10)])
        key = lambda p: (round(p[0].real, 6), round(p[0].imag, 6), p[1])
        assert sorted(map(key, got)) == sorted(map(key, expect))


@settings(max_examples=50, deadline=None)
@given(st.floats(-15, 15), st.floats(-15, 15))
def test_gamma_random_points(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-3 and round(x) <= 0:
        return
    ref = complex(mpmath.gamma(z))
    got = evaluate(Gamma(), z)
    assert abs(got - ref) <= 1e-10 * abs(ref)
