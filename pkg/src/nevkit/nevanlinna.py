"""Nevanlinna functionals of catalog functions and the shift-quotient bound.

Proximity functions come from :func:`nevkit.quadrature.circle_mean`; counting
functions are closed-form sums over the exact divisor. All functions here are
pure, so sweeps over radii can run concurrently.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import funcat
from .funcat import Quotient, order_at, shift, singular_points
from .quadrature import DEFAULT_SETTINGS, circle_mean


class DomainError(ValueError):
    """A parameter outside the range where a formula is defined."""


def log_plus(x):
    """max(log x, 0), with log_plus(0) = 0."""
    x = float(x)
    if x < 0:
        raise DomainError("log_plus of a negative number")
    return max(math.log(x), 0.0) if x > 0 else 0.0


@dataclass(frozen=True)
class NevanlinnaSample:
    r: float
    m_f: float
    m_inv: float
    N_f: float
    N_inv: float
    T: float
    quad_points: int
    quad_error_est: float

    @property
    def T_inv(self):
        return self.m_inv + self.N_inv

    def jensen_residual(self, log_abs_f0):
        """|T(r,f) - T(r,1/f) - log|f(0)||, which vanishes by Jensen's formula."""
        return abs(self.T - self.T_inv - log_abs_f0)


@dataclass(frozen=True)
class BoundCheck:
    r: float
    alpha: float
    delta: float
    c_mod: float
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class PoissonJensenTerms:
    S1: float
    S2: float
    S3: float

    @property
    def total(self):
        return self.S1 + self.S2 - self.S3


def _settings(settings):
    return DEFAULT_SETTINGS if settings is None else settings


def _singular(expr, r, settings):
    return singular_points(expr, r * (1 + settings.near_frac) + 1.0)


def log_plus_means(log_abs, singular, r, settings=None):
    """(m(r, f), m(r, 1/f)) from a vectorized ``log_abs(z) -> log|f(z)|``.

    Building block for functions outside the catalog (e.g. difference
    polynomials evaluated along the circle).
    """
    settings = _settings(settings)

    def integrand(z):
        L = log_abs(z)
        return np.vstack([np.maximum(L, 0.0), np.maximum(-L, 0.0)])

    res = circle_mean(integrand, r, singular, settings)
    return float(res.value[0]), float(res.value[1]), res


def proximity(expr, r, settings=None):
    """m(r, f): the circle mean of log+|f|."""
    if r <= 0:
        raise DomainError("radius must be positive")
    settings = _settings(settings)
    res = circle_mean(lambda z: np.maximum(expr.log_value(z).real, 0.0), r,
                      _singular(expr, r, settings), settings)
    return float(res.value[0])


def counting_number(expr, r, kind):
    """n(r): number of zeros or poles in the closed disc, with multiplicity."""
    return funcat.divisors_within(expr, r, kind, closed=True).degree


def integrated_counting(expr, r, kind):
    """N(r) = sum over 0 < |q| <= r of log(r/|q|), plus (mult. at 0) * log r."""
    if r <= 0:
        raise DomainError("radius must be positive")
    return counting_from_divisor(funcat.divisors_within(expr, r, kind, closed=True).points, r)


def counting_from_divisor(points, r):
    total = 0.0
    for loc, m in points:
        q = abs(loc)
        if q < 1e-14:
            total += m * math.log(r)
        elif q <= r:
            total += m * math.log(r / q)
    return total


def characteristic(expr, r, settings=None):
    if r <= 0:
        raise DomainError("radius must be positive")
    settings = _settings(settings)
    m_f, m_inv, res = log_plus_means(lambda z: expr.log_value(z).real,
                                     _singular(expr, r, settings), r, settings)
    N_f = integrated_counting(expr, r, "pole")
    N_inv = integrated_counting(expr, r, "zero")
    return NevanlinnaSample(r, m_f, m_inv, N_f, N_inv, m_f + N_f, res.nodes, res.error_est)


def difference_quotient(expr, c, h=0j):
    """f(z + c) / f(z + h) as a catalog expression."""
    return Quotient(shift(expr, c), shift(expr, h))


def diff_quotient_proximity(expr, c, r, settings=None):
    """m(r, f(z+c)/f(z))."""
    return proximity(difference_quotient(expr, c), r, settings)


def shifted_quotient_proximity(expr, c, h, r, settings=None):
    """m(r, f(z+c)/f(z+h))."""
    return proximity(difference_quotient(expr, c, h), r, settings)


def poisson_jensen_terms(expr, c, alpha, z, r, settings=None):
    """Split log|f(z+c)/f(z)| into boundary, zero and pole parts on |w| = s.

    Here s = (alpha + 1)/2 * (r + |c|). S1 is the circle integral of log|f|
    against the difference of Poisson kernels at z + c and z; S2 and S3 are the
    Blaschke-type sums over zeros and poles in |w| < s. The three satisfy
    log|f(z+c)/f(z)| = S1 + S2 - S3.
    """
    settings = _settings(settings)
    c = complex(c)
    z = complex(z)
    if alpha <= 1:
        raise DomainError("alpha must exceed 1")
    if abs(abs(z) - r) > 1e-9 * max(1.0, r):
        raise DomainError(f"|z| = {abs(z)} is not the radius r = {r}")
    if order_at(expr, 0j) != 0:
        raise DomainError("f must be regular and nonzero at the origin; use normalize_origin")
    s = 0.5 * (alpha + 1) * (r + abs(c))
    zc = z + c
    for w in (z, zc):
        if abs(abs(w) - s) <= 1e-12 * s:
            raise DomainError("evaluation point on the circle |w| = s")
    for loc in singular_points(expr, s, closed=True):
        if abs(loc - z) <= 1e-9 or abs(loc - zc) <= 1e-9:
            raise DomainError("evaluation point on divisor")

    def integrand(w):
        kernel = ((w + zc) / (w - zc) - (w + z) / (w - z)).real
        return expr.log_value(w).real * kernel

    near = singular_points(expr, s * (1 + settings.near_frac) + 1.0)
    S1 = float(circle_mean(integrand, s, near, settings).value[0])

    def blaschke_sum(points):
        total = 0.0
        for a, m in points:
            ac = a.conjugate()
            ratio = (s * (zc - a) / (s * s - ac * zc)) * ((s * s - ac * z) / (s * (z - a)))
            total += m * math.log(abs(ratio))
        return total

    S2 = blaschke_sum(funcat.divisors_within(expr, s, "zero").points)
    S3 = blaschke_sum(funcat.divisors_within(expr, s, "pole").points)
    return PoissonJensenTerms(S1, S2, S3)


def lemma_constant(alpha, delta, c_mod):
    """[8|c|(3a+1) + 8a(a-1)|c|^d] / [d(1-d)(a-1)^2], the r-free part of the bound."""
    if alpha <= 1:
        raise DomainError("alpha must exceed 1")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if c_mod < 0:
        raise DomainError("|c| must be nonnegative")
    num = 8 * c_mod * (3 * alpha + 1) + 8 * alpha * (alpha - 1) * c_mod ** delta
    return num / (delta * (1 - delta) * (alpha - 1) ** 2)


def lemma_bound(expr, c, r, alpha, delta, strict_statement=False, settings=None):
    """Compare m(r, f(z+c)/f(z)) with its explicit upper bound.

    The bound is lemma_constant(alpha, delta, |c|) / r**delta times
    T(alpha(r+|c|), f) + log+(1/|f(0)|). With ``strict_statement`` the
    factor 1/r**delta is applied a second time.
    """
    if r < 1:
        raise DomainError("the bound needs r >= 1")
    c = complex(c)
    c_mod = abs(c)
    K = lemma_constant(alpha, delta, c_mod)
    if order_at(expr, 0j) != 0:
        raise DomainError("f must be regular and nonzero at the origin; use normalize_origin")
    log_f0 = funcat.log_abs_at_origin(expr)
    T_big = characteristic(expr, alpha * (r + c_mod), settings).T
    rhs = bound_rhs(K, r, delta, T_big, log_f0, strict_statement)
    lhs = 0.0 if c == 0 else diff_quotient_proximity(expr, c, r, settings)
    return BoundCheck(r, alpha, delta, c_mod, lhs, rhs, lhs <= rhs * (1 + 1e-9))


def bound_rhs(K, r, delta, T_big, log_abs_f0, strict_statement=False):
    """K / r**delta * (T_big + log+(1/|f(0)|)), dividing by r**delta twice if strict."""
    scale = r ** delta
    if strict_statement:
        scale *= r ** delta
    return K / scale * (T_big + max(-log_abs_f0, 0.0))


def borel_alpha(r, c_mod, T_val, epsilon):
    """alpha = 1 + r / ((r + |c|) T^(epsilon/2)), defined once T >= e."""
    if T_val < math.e:
        raise DomainError(f"T = {T_val} is below e")
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    return 1.0 + r / ((r + c_mod) * T_val ** (epsilon / 2))
