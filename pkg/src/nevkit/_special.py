"""Complex log-Gamma and friends, vectorized over numpy arrays.

Everything here returns *a* complex logarithm of the function value: the real
part is log|value| and the imaginary part is some argument. Callers that need
the value itself exponentiate; callers that need log|value| take the real part.
Working in log form keeps Gamma usable far beyond the range where its values
overflow a double.
"""

import numpy as np

# Lanczos approximation, g = 7, n = 9.
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


def _loggamma_right(z):
    # Valid for Re z >= 0.5; there Re t > 0 so the principal log is safe.
    z = z - 1.0
    x = np.full(z.shape, LANCZOS_COEFFS[0], dtype=complex)
    for k, ck in enumerate(LANCZOS_COEFFS[1:], start=1):
        x = x + ck / (z + k)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def log_sinpi(z):
    """A complex logarithm of sin(pi*z), stable for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    n = np.round(z.real)
    w = z - n
    # sin(pi z) = (-1)^n sin(pi w); i*pi*n is a valid log of (-1)^n.
    upper = w.imag >= 0
    # For Im w >= 0: sin(pi w) = e^{-i pi w} (e^{2 i pi w} - 1) / (2i)
    # For Im w <  0: sin(pi w) = e^{ i pi w} (1 - e^{-2 i pi w}) / (2i)
    sgn = np.where(upper, 1.0, -1.0)
    q = np.exp(2j * np.pi * w * sgn)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -1j * np.pi * w * sgn + np.log1p(-q) - np.log(2j)
    out = out + np.where(upper, 1j * np.pi, 0.0) + 1j * np.pi * n
    return out


def loggamma(z):
    """Complex log Gamma(z); real part is log|Gamma(z)|, +inf at the poles."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if right.any():
        out[right] = _loggamma_right(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        with np.errstate(divide="ignore", invalid="ignore"):
            out[left] = _LOG_PI - log_sinpi(zl) - _loggamma_right(1.0 - zl)
        # exact poles: log sin -> -inf, make the real part a clean +inf
        bad = ~np.isfinite(out[left])
        if bad.any():
            tmp = out[left]
            tmp[bad] = complex(np.inf, 0.0)
            out[left] = tmp
    return out[0] if scalar else out


def log_tan(w):
    """A complex logarithm of tan(w), stable for large |Im w|."""
    w = np.asarray(w, dtype=complex)
    upper = w.imag >= 0
    sgn = np.where(upper, 1.0, -1.0)
    # tan w = i sgn (1 - q) / (1 + q) with q = exp(2 i sgn w), |q| <= 1
    q = np.exp(2j * sgn * w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(1j * sgn) + np.log1p(-q) - np.log1p(q)
    return out
