"""A closed catalog of meromorphic functions.

Every catalog member can be evaluated (in log form, vectorized) and can list its
zeros and poles inside any disc exactly. The second property is what the
Poisson-Jensen machinery needs, and it is the reason the catalog is closed
instead of accepting arbitrary callables.

The core primitive is :meth:`FunctionExpr.log_value`, which returns a complex
logarithm of f(z): ``Re`` is ``log|f(z)|`` and ``exp`` of it is ``f(z)``.
Exponential variants never form their values, so ``exp(exp(z))`` stays finite
in log space long after ``f`` itself overflows.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from . import _special
from ._complexlit import COMPLEX, format_complex, parse_complex

POLE_TOL = 1e-12
MERGE_TOL = 1e-9
ROOT_RESIDUAL_TOL = 1e-10
LOG_OVERFLOW = math.log(np.finfo(float).max)


class CatalogError(ValueError):
    """Bad catalog construction or unparsable catalog text."""


class RootFindingError(ArithmeticError):
    def __init__(self, coeffs, residual):
        self.coeffs = tuple(coeffs)
        self.residual = residual
        super().__init__(
            f"root finder did not converge for polynomial {list(self.coeffs)} "
            f"(relative residual {residual:.3g})"
        )


@dataclass(frozen=True)
class Pole:
    """Returned by :func:`evaluate` when z sits on a pole."""

    multiplicity: int


@dataclass(frozen=True)
class Saturated:
    """Returned by :func:`evaluate` when |f(z)| exceeds the double range.

    ``value`` has the right phase and magnitude clamped to the largest double;
    ``log_abs`` carries the true log|f(z)|.
    """

    value: complex
    log_abs: float


@dataclass(frozen=True)
class Divisor:
    points: Tuple[Tuple[complex, int], ...]
    kind: str

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def degree(self):
        return sum(m for _, m in self.points)


def _sort_key(loc):
    arg = cmath.phase(loc) % (2 * math.pi)
    return (float(f"{abs(loc):.12g}"), arg)


def _merge(points):
    """Merge signed (location, multiplicity) pairs that coincide."""
    merged = []
    for loc, m in points:
        for k, (loc2, m2) in enumerate(merged):
            if abs(loc - loc2) <= MERGE_TOL * max(1.0, abs(loc)):
                merged[k] = (loc2, m2 + m)
                break
        else:
            merged.append((loc, m))
    return [(loc, m) for loc, m in merged if m != 0]


def _inside(loc, R, closed):
    if closed:
        return abs(loc) <= R * (1 + 1e-12)
    return abs(loc) < R


# --------------------------------------------------------------------------
# polynomials


def _trim(coeffs):
    coeffs = [complex(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
    return tuple(coeffs) if coeffs else (0j,)


def _polyval_scale(coeffs, z):
    return sum(abs(c) * abs(z) ** k for k, c in enumerate(reversed(coeffs)))


def _polynomial_roots(coeffs):
    """Roots of a polynomial as (root, multiplicity) clusters, residual-checked."""
    coeffs = _trim(coeffs)
    if len(coeffs) == 1:
        return ()
    raw = list(np.roots(np.array(coeffs)))
    raw.sort(key=lambda w: (w.real, w.imag))
    clusters = []
    used = [False] * len(raw)
    for i, w in enumerate(raw):
        if used[i]:
            continue
        group = [w]
        used[i] = True
        for j in range(i + 1, len(raw)):
            if not used[j] and abs(raw[j] - w) <= 1e-4 * max(1.0, abs(w)):
                group.append(raw[j])
                used[j] = True
        centre = complex(np.mean(group))
        if len(group) > 1 and _rel_residual(coeffs, centre) > ROOT_RESIDUAL_TOL:
            clusters.extend((g, 1) for g in group)
        else:
            clusters.append((centre, len(group)))
    for w, _ in clusters:
        res = _rel_residual(coeffs, w)
        if res > ROOT_RESIDUAL_TOL:
            raise RootFindingError(coeffs, res)
    return tuple(clusters)


def _rel_residual(coeffs, w):
    scale = _polyval_scale(coeffs, w)
    if scale == 0:
        return 0.0
    return abs(np.polyval(np.array(coeffs), w)) / scale


def _poly_from_roots(lead, roots):
    flat = [w for w, m in roots for _ in range(m)]
    return tuple(complex(c) for c in lead * np.poly(flat)) if flat else (complex(lead),)


# --------------------------------------------------------------------------
# catalog variants


class FunctionExpr:
    """Base class of the catalog; instances are immutable."""

    def log_value(self, z):
        raise NotImplementedError

    def _raw_divisor(self, R, closed):
        """Signed (location, multiplicity) list, operands not merged."""
        raise NotImplementedError

    def is_entire(self):
        raise NotImplementedError

    def is_zero_free(self):
        raise NotImplementedError

    def to_text(self):
        raise NotImplementedError

    def __str__(self):
        return self.to_text()

    # thin conveniences mirroring the module-level operations
    def __call__(self, z):
        return evaluate(self, z)

    def divisors(self, R, kind, closed=False):
        return divisors_within(self, R, kind, closed=closed)


@dataclass(frozen=True, eq=True)
class Rational(FunctionExpr):
    numer: Tuple[complex, ...]
    denom: Tuple[complex, ...] = (1 + 0j,)
    zeros: Tuple[Tuple[complex, int], ...] = field(init=False, compare=False, repr=False)
    poles: Tuple[Tuple[complex, int], ...] = field(init=False, compare=False, repr=False)
    lead: complex = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        numer = _trim(self.numer)
        denom = _trim(self.denom)
        if denom == (0j,):
            raise CatalogError("rational denominator is identically zero")
        if numer == (0j,):
            object.__setattr__(self, "numer", (0j,))
            object.__setattr__(self, "denom", (1 + 0j,))
            object.__setattr__(self, "zeros", ())
            object.__setattr__(self, "poles", ())
            object.__setattr__(self, "lead", 0j)
            return
        zeros = list(_polynomial_roots(numer))
        poles = list(_polynomial_roots(denom))
        cancelled = False
        for i, (a, ma) in enumerate(zeros):
            for j, (b, mb) in enumerate(poles):
                if ma and mb and abs(a - b) <= 1e-8 * max(1.0, abs(a)):
                    k = min(ma, mb)
                    zeros[i] = (a, ma - k)
                    poles[j] = (b, mb - k)
                    ma -= k
                    cancelled = True
        zeros = [(w, m) for w, m in zeros if m]
        poles = [(w, m) for w, m in poles if m]
        lead = numer[0] / denom[0]
        if cancelled:
            numer = _poly_from_roots(lead, zeros)
            denom = _poly_from_roots(1.0, poles)
        else:
            numer = tuple(c / denom[0] for c in numer)
            denom = tuple(c / denom[0] for c in denom)
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "zeros", tuple(zeros))
        object.__setattr__(self, "poles", tuple(poles))
        object.__setattr__(self, "lead", lead)

    @property
    def is_zero(self):
        return self.lead == 0

    @property
    def degree(self):
        return max(len(self.numer), len(self.denom)) - 1

    def log_value(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.is_zero:
                return np.full(z.shape, complex(-np.inf, 0.0))
            out = np.full(z.shape, np.log(self.lead), dtype=complex)
            for a, m in self.zeros:
                out = out + m * np.log(z - a)
            for b, m in self.poles:
                out = out - m * np.log(z - b)
        return out

    def _raw_divisor(self, R, closed):
        pts = [(a, m) for a, m in self.zeros if _inside(a, R, closed)]
        pts += [(b, -m) for b, m in self.poles if _inside(b, R, closed)]
        return pts

    def is_entire(self):
        return not self.poles

    def is_zero_free(self):
        return not self.zeros and not self.is_zero

    def to_text(self):
        num = ",".join(format_complex(c) for c in self.numer)
        if self.denom == (1 + 0j,):
            return f"rat[{num}]"
        den = ",".join(format_complex(c) for c in self.denom)
        return f"rat[{num}]/[{den}]"


@dataclass(frozen=True)
class ExpPoly(FunctionExpr):
    """exp(p(z)); coefficients highest degree first."""

    poly_coeffs: Tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "poly_coeffs", _trim(self.poly_coeffs))

    def log_value(self, z):
        return np.polyval(np.array(self.poly_coeffs), np.asarray(z, dtype=complex))

    def _raw_divisor(self, R, closed):
        return []

    def is_entire(self):
        return True

    def is_zero_free(self):
        return True

    def to_text(self):
        return "exppoly[" + ",".join(format_complex(c) for c in self.poly_coeffs) + "]"


@dataclass(frozen=True)
class Tan(FunctionExpr):
    """tan(scale*z + shift)."""

    scale: complex
    shift: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        object.__setattr__(self, "shift", complex(self.shift))
        if self.scale == 0:
            raise CatalogError("tan scale must be nonzero")

    def log_value(self, z):
        return _special.log_tan(self.scale * np.asarray(z, dtype=complex) + self.shift)

    def _lattice(self, offset, R, closed, sign):
        # points (k*pi + offset - shift) / scale with modulus below R
        a, b = self.scale, self.shift
        centre = (offset - b) / math.pi
        span = R * abs(a) / math.pi + 2
        kmin = math.floor(centre.real - span)
        kmax = math.ceil(centre.real + span)
        pts = []
        for k in range(kmin, kmax + 1):
            loc = (k * math.pi + offset - b) / a
            if _inside(loc, R, closed):
                pts.append((complex(loc), sign))
        return pts

    def _raw_divisor(self, R, closed):
        return self._lattice(0.0, R, closed, 1) + self._lattice(math.pi / 2, R, closed, -1)

    def is_entire(self):
        return False

    def is_zero_free(self):
        return False

    def to_text(self):
        return f"tan[{format_complex(self.scale)},{format_complex(self.shift)}]"


@dataclass(frozen=True)
class Gamma(FunctionExpr):
    def log_value(self, z):
        return _special.loggamma(np.asarray(z, dtype=complex))

    def _raw_divisor(self, R, closed):
        return [(complex(-n), -1) for n in range(int(math.ceil(R)) + 1) if _inside(-n, R, closed)]

    def is_entire(self):
        return False

    def is_zero_free(self):
        return True

    def to_text(self):
        return "gamma"


@dataclass(frozen=True)
class ReciprocalGamma(FunctionExpr):
    def log_value(self, z):
        return -_special.loggamma(np.asarray(z, dtype=complex))

    def _raw_divisor(self, R, closed):
        return [(loc, -m) for loc, m in Gamma()._raw_divisor(R, closed)]

    def is_entire(self):
        return True

    def is_zero_free(self):
        return False

    def to_text(self):
        return "rgamma"


@dataclass(frozen=True)
class ExpOf(FunctionExpr):
    """exp(g(z)) for an entire catalog member g."""

    inner: FunctionExpr

    def __post_init__(self):
        if not self.inner.is_entire():
            raise CatalogError(f"exp() needs an entire argument, got {self.inner}")

    def log_value(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(self.inner.log_value(z))

    def _raw_divisor(self, R, closed):
        return []

    def is_entire(self):
        return True

    def is_zero_free(self):
        return True

    def to_text(self):
        return f"exp({self.inner.to_text()})"


@dataclass(frozen=True)
class Product(FunctionExpr):
    lhs: FunctionExpr
    rhs: FunctionExpr

    def log_value(self, z):
        return self.lhs.log_value(z) + self.rhs.log_value(z)

    def _raw_divisor(self, R, closed):
        return self.lhs._raw_divisor(R, closed) + self.rhs._raw_divisor(R, closed)

    def is_entire(self):
        return self.lhs.is_entire() and self.rhs.is_entire()

    def is_zero_free(self):
        return self.lhs.is_zero_free() and self.rhs.is_zero_free()

    def to_text(self):
        return f"mul({self.lhs.to_text()},{self.rhs.to_text()})"


@dataclass(frozen=True)
class Quotient(FunctionExpr):
    lhs: FunctionExpr
    rhs: FunctionExpr

    def log_value(self, z):
        return self.lhs.log_value(z) - self.rhs.log_value(z)

    def _raw_divisor(self, R, closed):
        return self.lhs._raw_divisor(R, closed) + [
            (loc, -m) for loc, m in self.rhs._raw_divisor(R, closed)
        ]

    def is_entire(self):
        return self.lhs.is_entire() and self.rhs.is_entire() and self.rhs.is_zero_free()

    def is_zero_free(self):
        return self.lhs.is_zero_free() and self.rhs.is_entire()

    def to_text(self):
        return f"div({self.lhs.to_text()},{self.rhs.to_text()})"


@dataclass(frozen=True)
class IntPow(FunctionExpr):
    base: FunctionExpr
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise CatalogError("IntPow exponent must be a nonzero integer")
        object.__setattr__(self, "k", int(self.k))

    def log_value(self, z):
        return self.k * self.base.log_value(z)

    def _raw_divisor(self, R, closed):
        return [(loc, self.k * m) for loc, m in self.base._raw_divisor(R, closed)]

    def is_entire(self):
        if self.k > 0:
            return self.base.is_entire()
        return self.base.is_entire() and self.base.is_zero_free()

    def is_zero_free(self):
        if self.k > 0:
            return self.base.is_zero_free()
        return self.base.is_entire()

    def to_text(self):
        return f"pow({self.base.to_text()},{self.k})"


@dataclass(frozen=True)
class Shift(FunctionExpr):
    """f(z + c)."""

    inner: FunctionExpr
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))

    def log_value(self, z):
        return self.inner.log_value(np.asarray(z, dtype=complex) + self.c)

    def _raw_divisor(self, R, closed):
        pts = self.inner._raw_divisor(R + abs(self.c), closed)
        out = []
        for loc, m in pts:
            w = loc - self.c
            if _inside(w, R, closed):
                out.append((w, m))
        return out

    def is_entire(self):
        return self.inner.is_entire()

    def is_zero_free(self):
        return self.inner.is_zero_free()

    def to_text(self):
        return f"shift({self.inner.to_text()},{format_complex(self.c)})"


def constant(value):
    return Rational((complex(value),))


def identity():
    return Rational((1 + 0j, 0j))


# --------------------------------------------------------------------------
# operations


def shift(expr, c):
    """f(z + c), collapsing nested shifts."""
    c = complex(c)
    if isinstance(expr, Shift):
        total = expr.c + c
        return expr.inner if total == 0 else Shift(expr.inner, total)
    if c == 0:
        return expr
    return Shift(expr, c)


def divisors_within(expr, R, kind, closed=False):
    """Zeros (``kind="zero"``) or poles (``kind="pole"``) with |location| < R.

    With ``closed=True`` points on the circle |z| = R are included as well.
    """
    if kind not in ("zero", "pole"):
        raise ValueError(f"kind must be 'zero' or 'pole', got {kind!r}")
    if R <= 0:
        raise ValueError("R must be positive")
    merged = _merge(expr._raw_divisor(R, closed))
    if kind == "zero":
        pts = [(loc, m) for loc, m in merged if m > 0]
    else:
        pts = [(loc, -m) for loc, m in merged if m < 0]
    pts.sort(key=lambda p: _sort_key(p[0]))
    return Divisor(tuple(pts), kind)


def signed_divisor(expr, R, closed=False):
    """Merged divisor as (location, signed multiplicity): zeros > 0, poles < 0."""
    pts = _merge(expr._raw_divisor(R, closed))
    pts.sort(key=lambda p: _sort_key(p[0]))
    return pts


def singular_points(expr, R, closed=True):
    """Every zero/pole location of every operand, *before* cancellation.

    Quadrature must steer clear of these: a cancelled pair evaluates as
    ``inf - inf`` in log form even though the function is regular there.
    """
    pts = []
    for loc, _ in expr._raw_divisor(R, closed):
        if not any(abs(loc - p) <= MERGE_TOL * max(1.0, abs(loc)) for p in pts):
            pts.append(loc)
    return pts


def order_at(expr, z):
    """Signed multiplicity of expr at z (zero order > 0, pole order < 0)."""
    tol = POLE_TOL * max(1.0, abs(z))
    for loc, m in signed_divisor(expr, abs(z) + 1.0, closed=True):
        if abs(loc - z) <= tol:
            return m
    return 0


def _from_log(L):
    if math.isnan(L.real) or math.isnan(L.imag):
        raise ArithmeticError("evaluation produced NaN")
    if L.real > LOG_OVERFLOW:
        phase = cmath.exp(1j * L.imag) if math.isfinite(L.imag) else 1.0
        return Saturated(np.finfo(float).max * phase, float(L.real))
    return complex(cmath.exp(L))


def evaluate(expr, z):
    """f(z) as a complex number, or :class:`Pole` / :class:`Saturated`."""
    z = complex(z)
    m = order_at(expr, z)
    if m < 0:
        return Pole(-m)
    if m > 0:
        return 0j
    tol = POLE_TOL * max(1.0, abs(z))
    # an operand singularity at z with net order 0 is a removable point
    if any(abs(p - z) <= tol for p in singular_points(expr, abs(z) + 1.0)):
        return _removable_value(expr, z)
    L = complex(expr.log_value(np.array([z]))[0])
    if math.isnan(L.real):
        return _removable_value(expr, z)
    return _from_log(L)


def _removable_value(expr, z, npts=16):
    # mean value property on a small circle; exact up to O(rho^npts)
    tol = POLE_TOL * max(1.0, abs(z))
    others = [p for p in singular_points(expr, abs(z) + 2.0) if abs(p - z) > tol]
    gap = min((abs(p - z) for p in others), default=1.0)
    rho = min(0.25 * gap, 1e-2 * max(1.0, abs(z)))
    w = z + rho * np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
    with np.errstate(over="ignore"):
        vals = np.exp(expr.log_value(w))
    return _from_log(complex(np.log(np.mean(vals)))) if np.all(np.isfinite(vals)) else _from_log(
        complex(np.mean(expr.log_value(w)))
    )


def normalize_origin(expr):
    """Return (g, p) with g(z) = z**p * f(z) regular and nonzero at the origin."""
    if isinstance(expr, Rational) and expr.is_zero:
        raise CatalogError("cannot normalize the zero function")
    p = -order_at(expr, 0j)
    if p == 0:
        return expr, 0
    if isinstance(expr, Rational):
        numer, denom = list(expr.numer), list(expr.denom)
        if p > 0:
            numer += [0j] * p
        else:
            denom += [0j] * (-p)
        return Rational(tuple(numer), tuple(denom)), p
    zp = Rational((1 + 0j,) + (0j,) * p) if p > 0 else Rational((1 + 0j,), (1 + 0j,) + (0j,) * (-p))
    return Product(zp, expr), p


def log_abs_at_origin(expr):
    """log|f(0)| for f regular and nonzero at 0."""
    v = evaluate(expr, 0j)
    if isinstance(v, Pole) or v == 0:
        raise CatalogError(f"{expr} has a zero or pole at the origin")
    if isinstance(v, Saturated):
        return v.log_abs
    return math.log(abs(v))


# --------------------------------------------------------------------------
# text format


_TOKEN_RE = re.compile(rf"\s*(?:(?P<punct>[\[\](),/])|(?P<num>{COMPLEX})|(?P<name>[a-z]+))")


class _TextParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise CatalogError(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self):
        m = _TOKEN_RE.match(self.text, self.pos)
        return m

    def expect(self, ch):
        m = self.peek()
        if not m or m.group("punct") != ch:
            self.error(f"expected {ch!r}")
        self.pos = m.end()

    def at(self, ch):
        m = self.peek()
        return bool(m and m.group("punct") == ch)

    def number(self):
        m = self.peek()
        if not m or m.group("num") is None:
            self.error("expected a number")
        self.pos = m.end()
        return parse_complex(m.group("num"))

    def numlist(self):
        self.expect("[")
        vals = [self.number()]
        while self.at(","):
            self.expect(",")
            vals.append(self.number())
        self.expect("]")
        return tuple(vals)

    def expr(self):
        m = self.peek()
        if not m or m.group("name") is None:
            self.error("expected a function name")
        name = m.group("name")
        self.pos = m.end()
        if name == "gamma":
            return Gamma()
        if name == "rgamma":
            return ReciprocalGamma()
        if name == "z":
            return identity()
        if name == "const":
            (v,) = self.numlist()
            return constant(v)
        if name == "rat":
            numer = self.numlist()
            denom = (1 + 0j,)
            if self.at("/"):
                self.expect("/")
                denom = self.numlist()
            return Rational(numer, denom)
        if name == "exppoly":
            return ExpPoly(self.numlist())
        if name == "tan":
            vals = self.numlist()
            if len(vals) not in (1, 2):
                self.error("tan takes [scale] or [scale,shift]")
            return Tan(*vals)
        if name in ("exp", "mul", "div", "pow", "shift"):
            self.expect("(")
            a = self.expr()
            if name == "exp":
                self.expect(")")
                return ExpOf(a)
            self.expect(",")
            if name in ("mul", "div"):
                b = self.expr()
                self.expect(")")
                return Product(a, b) if name == "mul" else Quotient(a, b)
            v = self.number()
            self.expect(")")
            if name == "pow":
                if v.imag != 0 or not float(v.real).is_integer():
                    self.error("pow exponent must be an integer")
                return IntPow(a, int(v.real))
            return shift(a, v)
        self.error(f"unknown function {name!r}")


def parse_function(text):
    """Parse the prefix text format, e.g. ``shift(gamma,1)`` or ``rat[1,-3]/[1,1]``."""
    p = _TextParser(text)
    expr = p.expr()
    if text[p.pos:].strip():
        p.error("trailing characters")
    return expr


FunctionLike = Union[FunctionExpr, str]


def as_function(f):
    return parse_function(f) if isinstance(f, str) else f
