import mpmath
import numpy as np
import pytest

from nevkit._special import log_sinpi, log_tan, loggamma


def _grid(seed, n=200, scale=20.0):
    rng = np.random.default_rng(seed)
    return scale * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))


def test_loggamma_matches_mpmath():
    z = _grid(1)
    got = np.exp(loggamma(z))
    for zk, g in zip(z, got):
        ref = complex(mpmath.gamma(complex(zk)))
        assert abs(g - ref) <= 1e-10 * abs(ref)


def test_loggamma_real_part_large_radius():
    # real part is what the quadrature sees; compare at |z| up to 200
    z = _grid(2, 50, 200.0)
    got = loggamma(z).real
    ref = np.array([float(mpmath.re(mpmath.loggamma(complex(w)))) for w in z])
    assert np.max(np.abs(got - ref) / np.maximum(1, np.abs(ref))) < 1e-12


def test_loggamma_poles_are_infinite():
    vals = loggamma(np.array([0, -1, -2, -7], dtype=complex))
    assert np.all(vals.real == np.inf)


@pytest.mark.parametrize("z", [0.3 + 0.1j, -2.7 + 0.4j, 5.5 - 30j, 1e-3j])
def test_log_sinpi(z):
    ref = complex(mpmath.sin(mpmath.pi * z))
    assert abs(np.exp(log_sinpi(np.array([z]))[0]) - ref) <= 1e-12 * max(1, abs(ref))


def test_log_sinpi_huge_imaginary_part_does_not_overflow():
    L = log_sinpi(np.array([0.25 + 400j]))[0]
    assert abs(L.real - (400 * np.pi - np.log(2))) < 1e-9


@pytest.mark.parametrize("w", [0.3 + 0.2j, 2 - 1j, -40 + 0.01j, 1 + 300j])
def test_log_tan(w):
    ref = complex(mpmath.tan(w))
    assert abs(np.exp(log_tan(np.array([w]))[0]) - ref) <= 1e-12 * max(1, abs(ref))
