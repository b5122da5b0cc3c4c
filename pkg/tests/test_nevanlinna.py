import cmath
import math

import numpy as np
import pytest

from nevkit import funcat, nevanlinna as nv
from nevkit.funcat import ExpOf, ExpPoly, Gamma, Rational, Tan, constant, evaluate, identity
from nevkit.harness import random_rational

HALF_PI = math.pi / 2


def test_log_plus():
    assert nv.log_plus(0) == 0
    assert nv.log_plus(0.5) == 0
    assert nv.log_plus(math.e) == 1
    with pytest.raises(nv.DomainError):
        nv.log_plus(-1)


def test_proximity_examples():
    assert abs(nv.proximity(identity(), math.e) - 1.0) < 1e-12
    assert nv.proximity(constant(1), 3.0) == 0
    assert abs(nv.proximity(ExpPoly((1, 0)), math.pi) - 1.0) < 1e-9


def test_proximity_radius_positive():
    with pytest.raises(nv.DomainError):
        nv.proximity(identity(), 0)


def test_integrated_counting_examples():
    assert nv.integrated_counting(Rational((1, 2, 3)), 5, "pole") == 0
    assert abs(nv.integrated_counting(Tan(HALF_PI), 2, "pole") - 2 * math.log(2)) < 1e-12
    assert abs(nv.integrated_counting(Rational((1, -3), (1, 2, 1)), 2, "pole") - 2 * math.log(2)) < 1e-12


def test_counting_includes_circle():
    assert nv.counting_number(Tan(HALF_PI), 1.0, "pole") == 2
    assert nv.integrated_counting(Tan(HALF_PI), 1.0, "pole") == 0


def test_characteristic_examples():
    s = nv.characteristic(ExpPoly((1, 0)), math.pi)
    assert abs(s.T - 1.0) < 1e-9 and s.T == s.m_f + s.N_f
    for r in (0.5, 7.0):
        assert abs(nv.characteristic(constant(5), r).T - math.log(5)) < 1e-12
    f = Rational((1, -2), (1, -0.5j))
    for r in (1, 2, 5, 10):
        s = nv.characteristic(f, r)
        assert abs(s.T - s.T_inv - math.log(4)) < 1e-9


def test_jensen_random_rationals():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = random_rational(rng)
        log0 = funcat.log_abs_at_origin(f)
        for r in (1, 2, 5, 10):
            assert nv.characteristic(f, r).jensen_residual(log0) < 1e-6


def test_T_monotone():
    for f in (Gamma(), ExpPoly((1, 0, 0)), Tan(HALF_PI), Rational((1, 0, -1), (1, 3j))):
        Ts = [nv.characteristic(f, r).T for r in np.geomspace(0.5, 12, 9)]
        assert all(b >= a - 1e-9 for a, b in zip(Ts, Ts[1:]))


def test_diff_quotient_examples():
    assert abs(nv.diff_quotient_proximity(Gamma(), 1, 10) - math.log(10)) < 1e-9
    got = nv.diff_quotient_proximity(ExpPoly((1, 0, 0)), 1, 50)
    closed = (math.sqrt(4 * 50 ** 2 - 1) + math.acos(-1 / 100)) / math.pi
    assert abs(got - closed) < 1e-8
    assert nv.diff_quotient_proximity(constant(3), 1, 4) == 0


def test_shifted_quotient():
    rng = np.random.default_rng(5)
    cat = [Gamma(), Tan(HALF_PI), ExpPoly((1, 0, 0)), random_rational(rng)]
    for k in range(20):
        f = cat[k % 4]
        c = complex(*rng.uniform(-2, 2, 2))
        r = float(rng.uniform(1, 8))
        assert abs(nv.shifted_quotient_proximity(f, c, 0, r) - nv.diff_quotient_proximity(f, c, r)) < 1e-9
    assert nv.shifted_quotient_proximity(Gamma(), 1.5, 1.5, 3) == 0
    ref = nv.proximity(Rational((1, 1)), 10)
    assert abs(nv.shifted_quotient_proximity(Gamma(), 2, 1, 10) - ref) < 1e-9
    assert abs(ref - math.log(10)) < 0.02


def _scaled(g, lam):
    if isinstance(g, ExpOf):
        # exp(lam e^z) = exp(e^(z + log lam))
        return funcat.shift(g, math.log(lam))
    return ExpPoly(tuple(lam * c for c in g.poly_coeffs))


@pytest.mark.parametrize("g", [ExpPoly((1, 0)), ExpPoly((1, 0, 0)), ExpOf(ExpPoly((1, 0)))],
                         ids=["z", "z^2", "e^z"])
def test_exact_ratio_law(g):
    for lam in (2, math.e - 1):
        for r in (1, 2, 3):
            a, b = nv.proximity(_scaled(g, lam), r), nv.proximity(g, r)
            assert abs(a - lam * b) <= 1e-6 * lam * b


def test_poisson_jensen_example():
    f = Rational((1, -3))
    t = nv.poisson_jensen_terms(f, 1, 2, 1, 1)
    expect = math.log(abs(evaluate(f, 2) / evaluate(f, 1)))
    assert abs(t.total - expect) < 1e-9
    assert abs(expect - math.log(0.5)) < 1e-15


def test_poisson_jensen_empty_sums_and_zero_shift():
    t = nv.poisson_jensen_terms(ExpPoly((1, 0)), 1, 1.5, 2 * cmath.exp(0.3j), 2)
    assert t.S2 == 0 and t.S3 == 0
    assert abs(t.S1 - 1.0) < 1e-9
    f = Rational((1, -3, 2j), (1, 4))
    t = nv.poisson_jensen_terms(f, 0, 2, 1.5j, 1.5)
    assert abs(t.S1) < 1e-12 and abs(t.S2) < 1e-12 and abs(t.S3) < 1e-12


def test_poisson_jensen_residual_random():
    rng = np.random.default_rng(3)
    done = 0
    while done < 20:
        f = random_rational(rng, radius=6.0)
        for r in (1, 3):
            for c in (1, 1j):
                z = r * cmath.exp(2j * math.pi * rng.uniform())
                try:
                    t = nv.poisson_jensen_terms(f, c, 2.0, z, r)
                except nv.DomainError:
                    continue
                exact = (f.log_value(np.array([z + c])) - f.log_value(np.array([z])))[0].real
                assert abs(exact - t.total) < 1e-7
        done += 1


def test_poisson_jensen_preconditions():
    f = Rational((1, -3))
    with pytest.raises(nv.DomainError):
        nv.poisson_jensen_terms(f, 1, 1.0, 1, 1)
    with pytest.raises(nv.DomainError):
        nv.poisson_jensen_terms(f, 1, 2, 2, 1)
    with pytest.raises(nv.DomainError):
        nv.poisson_jensen_terms(Gamma(), 1, 2, 1, 1)
    with pytest.raises(nv.DomainError, match="evaluation point on divisor"):
        nv.poisson_jensen_terms(f, 1, 3, 2, 2)


def test_lemma_constant_examples():
    assert abs(nv.lemma_constant(2, 0.5, 1) - 288) < 1e-12
    assert nv.lemma_constant(2, 0.5, 0) == 0
    for bad in ((1, 0.5, 1), (2, 0, 1), (2, 1, 1), (2, 0.5, -1)):
        with pytest.raises(nv.DomainError):
            nv.lemma_constant(*bad)


def test_lemma_bound_examples():
    f = ExpPoly((1, 0))
    b = nv.lemma_bound(f, 1, 10, 2, 0.5)
    assert abs(b.lhs - 1) < 1e-12
    assert abs(b.rhs - 288 * 22 / math.pi / math.sqrt(10)) < 1e-6
    assert b.passed
    z = nv.lemma_bound(f, 0, 10, 2, 0.5)
    assert z.lhs == 0 and z.rhs == 0 and z.passed
    strict = nv.lemma_bound(f, 1, 10, 2, 0.5, strict_statement=True)
    assert abs(strict.rhs * math.sqrt(10) - b.rhs) < 1e-9
    with pytest.raises(nv.DomainError):
        nv.lemma_bound(f, 1, 0.5, 2, 0.5)
    with pytest.raises(nv.DomainError):
        nv.lemma_bound(Gamma(), 1, 2, 2, 0.5)


def test_borel_alpha():
    assert abs(nv.borel_alpha(1, 1, math.e, 2) - (1 + 1 / (2 * math.e))) < 1e-15
    assert abs(nv.borel_alpha(7.3, 0, math.e, 2) - (1 + 1 / math.e)) < 1e-15
    vals = [nv.borel_alpha(3, 1, 10, eps) for eps in (0.5, 1, 4, 8)]
    assert all(a > b > 1 for a, b in zip(vals, vals[1:]))
    with pytest.raises(nv.DomainError):
        nv.borel_alpha(1, 1, 2.0, 1)
