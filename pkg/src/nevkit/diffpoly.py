"""Difference polynomials in f and the numerical Clunie / Mohon'ko checks.

A difference polynomial is a finite sum of terms ``a(z) * prod_j f(z+c_j)^l_j``
with a constant (optionally times a catalog function) as coefficient. Text
form::

    f(z)*f(z+1) + 1
    f(z+1)^2 - 2*f(z)
    (1+2i)*{rat[1,0]}*f(z-i)^3

Catalog coefficients are written in braces using the catalog text format;
``gamma``, ``rgamma``, ``exppoly[..]`` and ``tan[..]`` may also appear bare.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from . import funcat
from ._complexlit import NUM, format_complex
from .funcat import FunctionExpr, Pole, Product, Rational, Saturated, shift
from .nevanlinna import characteristic, counting_from_divisor, log_plus_means


class ParseError(ValueError):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class CheckError(ValueError):
    """A hypothesis gate of a check failed; the check produced no records."""


class DegreeHypothesisError(CheckError):
    pass


class EquationResidualError(CheckError):
    pass


class TargetSatisfiesEquationError(CheckError):
    pass


class SlowMovementError(CheckError):
    pass


# --------------------------------------------------------------------------
# AST


def _shift_key(c):
    return (c.real, c.imag)


@dataclass(frozen=True)
class Term:
    coeff: complex
    factors: Tuple[Tuple[complex, int], ...] = ()
    func: Optional[FunctionExpr] = None

    def __post_init__(self):
        merged = {}
        for c, l in self.factors:
            if int(l) != l or l < 0:
                raise ValueError(f"exponent must be a nonnegative integer, got {l}")
            if l:
                c = complex(c)
                merged[c] = merged.get(c, 0) + int(l)
        object.__setattr__(self, "factors", tuple(sorted(merged.items(), key=lambda p: _shift_key(p[0]))))
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def degree(self):
        return sum(l for _, l in self.factors)

    @property
    def key(self):
        return (self.factors, self.func)

    def __mul__(self, other):
        if self.func is None:
            func = other.func
        elif other.func is None:
            func = self.func
        else:
            func = Product(self.func, other.func)
        return Term(self.coeff * other.coeff, self.factors + other.factors, func)


def _term_sort_key(t):
    return (
        -t.degree,
        tuple((c.real, c.imag, -l) for c, l in t.factors),
        "" if t.func is None else t.func.to_text(),
    )


@dataclass(frozen=True)
class DiffPoly:
    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        acc = {}
        order = []
        for t in self.terms:
            if t.key in acc:
                acc[t.key] = replace(acc[t.key], coeff=acc[t.key].coeff + t.coeff)
            else:
                acc[t.key] = t
                order.append(t.key)
        terms = [acc[k] for k in order if acc[k].coeff != 0]
        terms.sort(key=_term_sort_key)
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def constant(cls, value):
        return cls((Term(complex(value)),))

    @classmethod
    def factor(cls, c=0j, power=1):
        return cls((Term(1.0, ((complex(c), power),)),))

    @classmethod
    def coefficient(cls, func):
        return cls((Term(1.0, (), func),))

    def __add__(self, other):
        other = _as_poly(other)
        return DiffPoly(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly(tuple(replace(t, coeff=-t.coeff) for t in self.terms))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return DiffPoly(tuple(a * b for a in self.terms for b in other.terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        if int(k) != k or k < 0:
            raise ValueError("power must be a nonnegative integer")
        out = DiffPoly.constant(1)
        for _ in range(int(k)):
            out = out * self
        return out

    @property
    def total_degree(self):
        return max((t.degree for t in self.terms), default=0)

    @property
    def max_shift(self):
        return max((abs(c) for t in self.terms for c, _ in t.factors), default=0.0)

    @property
    def shifts(self):
        return sorted({c for t in self.terms for c, _ in t.factors}, key=_shift_key)

    def report(self):
        return DegreeReport(self.total_degree, self.max_shift, len(self.terms))

    def render(self):
        return render(self)

    def __str__(self):
        return render(self)


def _as_poly(x):
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, FunctionExpr):
        return DiffPoly.coefficient(x)
    return DiffPoly.constant(x)


@dataclass(frozen=True)
class DegreeReport:
    total_degree: int
    max_shift: float
    term_count: int


# --------------------------------------------------------------------------
# text


_TOKEN_SPEC = [
    ("ws", r"\s+"),
    ("num", rf"{NUM}i?"),
    ("imag", r"i(?![A-Za-z_])"),
    ("brace", r"\{[^{}]*\}"),
    ("catalog", r"(?:exppoly|tan|rat|const)\[[^\]]*\]|rgamma|gamma"),
    ("f", r"f(?![A-Za-z_])"),
    ("z", r"z(?![A-Za-z_])"),
    ("op", r"[-+*^()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def _number(tok):
    s = tok[1]
    if s.endswith("i"):
        return complex(0.0, float(s[:-1]))
    return complex(float(s), 0.0)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    @property
    def tok(self):
        return self.toks[self.k]

    def advance(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def is_op(self, ch):
        return self.tok[0] == "op" and self.tok[1] == ch

    def expect_op(self, ch):
        if not self.is_op(ch):
            raise ParseError(f"expected {ch!r}, found {self.tok[1] or 'end of input'!r}", self.tok[2])
        self.advance()

    def parse(self):
        poly = self.expr()
        if self.tok[0] != "end":
            raise ParseError(f"unexpected {self.tok[1]!r}", self.tok[2])
        return poly

    def expr(self):
        sign = 1
        if self.is_op("+") or self.is_op("-"):
            sign = -1 if self.advance()[1] == "-" else 1
        out = self.term()
        if sign < 0:
            out = -out
        while self.is_op("+") or self.is_op("-"):
            op = self.advance()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.power()
        while self.is_op("*"):
            self.advance()
            out = out * self.power()
        return out

    def power(self):
        base = self.primary()
        if self.is_op("^"):
            self.advance()
            tok = self.tok
            if tok[0] == "op" and tok[1] == "-":
                raise ParseError("negative exponent in a polynomial", tok[2])
            if tok[0] != "num" or not re.fullmatch(r"\d+", tok[1]):
                raise ParseError(f"non-integer exponent {tok[1]!r}", tok[2])
            self.advance()
            base = base ** int(tok[1])
        return base

    def primary(self):
        tok = self.tok
        kind = tok[0]
        if kind == "num":
            self.advance()
            return DiffPoly.constant(_number(tok))
        if kind == "imag":
            self.advance()
            return DiffPoly.constant(1j)
        if kind in ("brace", "catalog"):
            self.advance()
            text = tok[1][1:-1] if kind == "brace" else tok[1]
            try:
                func = funcat.parse_function(text)
            except funcat.CatalogError as exc:
                raise ParseError(f"bad catalog coefficient: {exc}", tok[2]) from None
            if _is_constant(func):
                return DiffPoly.constant(func.lead)
            return DiffPoly.coefficient(func)
        if kind == "f":
            return self.fcall()
        if self.is_op("("):
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "z":
            raise ParseError("bare z is not a coefficient; use {rat[1,0]}", tok[2])
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    def fcall(self):
        self.advance()
        self.expect_op("(")
        tok = self.tok
        if tok[0] == "f":
            raise ParseError("nested f application", tok[2])
        if tok[0] != "z":
            raise ParseError("f takes an argument of the form z or z+c", tok[2])
        self.advance()
        c = 0j
        while self.is_op("+") or self.is_op("-"):
            sign = -1 if self.advance()[1] == "-" else 1
            tok = self.tok
            if tok[0] == "f":
                raise ParseError("nested f application", tok[2])
            if tok[0] == "num":
                c += sign * _number(tok)
            elif tok[0] == "imag":
                c += sign * 1j
            else:
                raise ParseError("shift must be a complex literal", tok[2])
            self.advance()
        if self.tok[0] == "f" or self.is_op("("):
            raise ParseError("nested f application", self.tok[2])
        self.expect_op(")")
        return DiffPoly.factor(c)


def parse(text):
    """Parse difference-polynomial text into a normalized :class:`DiffPoly`."""
    return _Parser(text).parse()


def _render_factor(c, l):
    if c == 0:
        s = "f(z)"
    else:
        lit = format_complex(c)
        s = f"f(z{lit})" if lit.startswith("-") else f"f(z+{lit})"
    return s if l == 1 else f"{s}^{l}"


def _split_sign(c):
    """(sign, magnitude text or None for unit, needs_paren)."""
    if c.imag == 0:
        mag = abs(c.real)
        return ("-" if c.real < 0 else "+"), (None if mag == 1 else format_complex(mag))
    if c.real == 0:
        mag = abs(c.imag)
        return ("-" if c.imag < 0 else "+"), format_complex(complex(0, mag))
    return "+", f"({format_complex(c)})"


def render(P):
    if not P.terms:
        return "0"
    pieces = []
    for t in P.terms:
        sign, mag = _split_sign(t.coeff)
        parts = []
        if t.func is not None:
            parts.append("{" + t.func.to_text() + "}")
        parts += [_render_factor(c, l) for c, l in t.factors]
        if mag is not None or not parts:
            parts.insert(0, mag if mag is not None else "1")
        pieces.append((sign, "*".join(parts)))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# --------------------------------------------------------------------------
# evaluation


def _logsumexp(logs):
    """Complex log of sum(exp(L)) computed without overflow."""
    if len(logs) == 1:
        return logs[0]
    stack = np.array(logs)
    M = np.max(stack.real, axis=0)
    finite_M = np.where(np.isfinite(M), M, 0.0)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        S = np.exp(stack - finite_M).sum(axis=0)
        out = finite_M + np.log(S)
    out = np.where(M == -np.inf, complex(-np.inf, 0.0), out)
    out = np.where(M == np.inf, complex(np.inf, 0.0), out)
    return out


def term_logs(P, f, z):
    """Complex logs of each term of P(z, f) at the points z."""
    z = np.asarray(z, dtype=complex)
    cache = {}
    logs = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for t in P.terms:
            L = np.full(z.shape, np.log(t.coeff), dtype=complex)
            if t.func is not None:
                L = L + t.func.log_value(z)
            for c, l in t.factors:
                if c not in cache:
                    cache[c] = shift(f, c).log_value(z)
                L = L + l * cache[c]
            logs.append(L)
    return logs


def poly_log_value(P, f, z):
    """A complex logarithm of P(z, f) at the points z (vectorized)."""
    z = np.asarray(z, dtype=complex)
    if not P.terms:
        return np.full(z.shape, complex(-np.inf, 0.0))
    return _logsumexp(term_logs(P, f, z))


def _scalar_log(value):
    if isinstance(value, Saturated):
        return complex(value.log_abs, np.angle(value.value))
    if value == 0:
        return complex(-np.inf, 0.0)
    return complex(np.log(complex(value)))


def evaluate_poly(P, f, z):
    """P(z, f) at a single point; a pole of any factor gives a :class:`Pole`."""
    z = complex(z)
    cache = {}
    logs = []
    pole_order = 0
    for t in P.terms:
        L = complex(np.log(t.coeff))
        order = 0
        vals = []
        if t.func is not None:
            vals.append((funcat.evaluate(t.func, z), 1))
        for c, l in t.factors:
            if c not in cache:
                cache[c] = funcat.evaluate(shift(f, c), z)
            vals.append((cache[c], l))
        for v, l in vals:
            if isinstance(v, Pole):
                order += v.multiplicity * l
            else:
                L += l * _scalar_log(v)
        if order:
            pole_order = max(pole_order, order)
        logs.append(np.array([L]))
    if pole_order:
        return Pole(pole_order)
    if not logs:
        return 0j
    total = complex(_logsumexp(logs)[0])
    if total.real == -np.inf:
        return 0j
    return funcat._from_log(total)


def singular_points(P, f, R):
    pts = []
    for c in P.shifts:
        pts += funcat.singular_points(shift(f, c), R)
    for t in P.terms:
        if t.func is not None:
            pts += funcat.singular_points(t.func, R)
    return pts


def relative_residual(P, f, z):
    """|P(z,f)| / max(1, max_term |term|) at each z; zero for exact solutions."""
    logs = term_logs(P, f, z)
    if not logs:
        return np.zeros(np.shape(z))
    stack = np.array(logs)
    M = np.maximum(np.max(stack.real, axis=0), 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        return np.abs(np.exp(stack - M).sum(axis=0))


def _winding(P, f, q, rho, npts=64):
    w = q + rho * np.exp(2j * np.pi * np.arange(npts + 1) / npts)
    L = poly_log_value(P, f, w)
    d = np.diff(L.imag)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return int(round(d.sum() / (2 * np.pi)))


def pole_divisor(P, f, R):
    """Poles of z -> P(z, f) in the closed disc |z| <= R, as (location, order).

    Candidates are the operand singularities; each one's order comes from the
    winding number of P(z, f) around a small circle.
    """
    cands = [q for q in singular_points(P, f, R) if abs(q) <= R * (1 + 1e-12)]
    out = []
    for k, q in enumerate(cands):
        others = [abs(q - p) for j, p in enumerate(cands) if j != k]
        rho = min(0.25 * min(others, default=1.0), 1e-3 * max(1.0, abs(q)))
        order = _winding(P, f, q, rho)
        if order < 0:
            out.append((q, -order))
    return out


def composed_characteristic(P, f, r, settings=None):
    """(m(r, P), T(r, P)) for the function z -> P(z, f)."""
    sing = singular_points(P, f, r * 1.02 + 1.0)
    m, _, _ = log_plus_means(lambda z: poly_log_value(P, f, z).real, sing, r, settings)
    return m, m + counting_from_divisor(pole_divisor(P, f, r), r)


def composed_proximity(P, f, r, settings=None, reciprocal=False):
    sing = singular_points(P, f, r * 1.02 + 1.0)
    m, m_inv, _ = log_plus_means(lambda z: poly_log_value(P, f, z).real, sing, r, settings)
    return m_inv if reciprocal else m


# --------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CheckRecord:
    r: float
    lhs: float
    comparator: float
    ratio: float
    passed: bool = True
    flagged_exceptional: bool = False
    # T(r, f) alongside, for ratios against the characteristic itself
    T_f: float = math.nan


class CheckRun(list):
    """A list of :class:`CheckRecord` sorted by r, plus run-level facts."""

    def __init__(self, records=(), **meta):
        super().__init__(sorted(records, key=lambda rec: rec.r))
        self.meta = meta

    @property
    def log_measure(self):
        return empirical_log_measure([rec.r for rec in self], [rec.flagged_exceptional for rec in self])


def _ratio(lhs, comparator):
    return lhs / comparator if comparator > 0 else (0.0 if lhs == 0 else math.inf)


def flag_exceptional(ratios, factor=3.0, neighbours=5, floor=0.0):
    """Flag entries exceeding ``factor`` times the median of their nearest neighbours.

    Neighbours are taken by grid index (the grids are sorted, typically
    log-spaced). ``floor`` is a lower bound on the median, so that a run of
    exact zeros does not flag every positive value next to it.
    """
    ratios = list(ratios)
    n = len(ratios)
    flags = []
    for i, x in enumerate(ratios):
        order = sorted((j for j in range(n) if j != i), key=lambda j: (abs(j - i), j))
        near = [ratios[j] for j in order[:neighbours]]
        if not near:
            flags.append(False)
            continue
        med = max(float(np.median(near)), floor)
        flags.append(bool(x > factor * med))
    return flags


def empirical_log_measure(rs, flags):
    """Sum of dr/r over flagged grid points, dr the local cell width."""
    rs = list(rs)
    total = 0.0
    for i, (r, fl) in enumerate(zip(rs, flags)):
        if not fl:
            continue
        lo = rs[i - 1] if i > 0 else r
        hi = rs[i + 1] if i + 1 < len(rs) else r
        width = 0.5 * (hi - lo) if len(rs) > 1 else 0.0
        total += width / r
    return total


def decay_trend(rs, ratios):
    """Least-squares slope of ratio against log r; negative means decaying."""
    if len(rs) < 2:
        return 0.0
    return float(np.polyfit(np.log(rs), ratios, 1)[0])


def _assess(records, threshold, trend_ratio):
    """Stamp flags and verdicts on records of a Clunie/Mohon'ko run.

    The o(T) claim is read at finite r as: below ``threshold`` at the largest
    non-flagged radius, and a non-increasing trend over the top half of the
    grid. Rows before the largest radius which exceed the threshold pass only
    if that trend holds.
    """
    records = sorted(records, key=lambda rec: rec.r)
    flags = flag_exceptional([trend_ratio(rec) for rec in records], floor=0.01 * threshold)
    records = [replace(rec, flagged_exceptional=fl) for rec, fl in zip(records, flags)]
    kept = [rec for rec in records if not rec.flagged_exceptional]
    if not kept:
        return records, False, math.nan
    top = [rec for rec in kept if rec.r >= records[len(records) // 2].r]
    slope = decay_trend([rec.r for rec in top], [trend_ratio(rec) for rec in top])
    trend_ok = slope <= 0
    last = kept[-1]
    out = []
    for rec in records:
        ok = trend_ratio(rec) < threshold
        if rec is last or rec.r == last.r:
            passed = ok
        else:
            passed = ok or trend_ok
        out.append(replace(rec, passed=passed))
    return out, trend_ok, slope


def _sample_points(r_grid, per_circle=32):
    theta = 2 * np.pi * (np.arange(per_circle) + 0.3) / per_circle
    return np.concatenate([r * np.exp(1j * theta) for r in r_grid])


def _parallel(fn, items, executor):
    return list(executor.map(fn, items)) if executor is not None else [fn(x) for x in items]


def clunie_split_check(n, P, Q, f, r_grid, delta, epsilon, threshold=0.05, settings=None, executor=None):
    """Numerical Clunie-type check for a solution of f(z)^n P(z,f) = Q(z,f).

    Each record compares m(r, P(z,f)) with T(r+|c|, f)^(1+eps)/r^delta + T(r, f).
    """
    P, Q = _as_poly(P), _as_poly(Q)
    if Q.total_degree > n:
        raise DegreeHypothesisError(f"deg Q = {Q.total_degree} exceeds n = {n}")
    equation = DiffPoly.factor(0j, n) * P - Q if n else P - Q
    resid = relative_residual(equation, f, _sample_points(r_grid)).max()
    if not resid < 1e-6:
        raise EquationResidualError(f"equation residual {resid:.3g} exceeds 1e-6")
    c_mod = max(P.max_shift, Q.max_shift)

    def row(r):
        lhs = composed_proximity(P, f, r, settings)
        T_r = characteristic(f, r, settings).T
        T_b = characteristic(f, r + c_mod, settings).T
        comp = T_b ** (1 + epsilon) / r ** delta + T_r
        return CheckRecord(r, lhs, comp, _ratio(lhs, comp), T_f=T_r)

    records = _parallel(row, sorted(r_grid), executor)
    records, trend_ok, slope = _assess(records, threshold, lambda rec: _ratio(rec.lhs, rec.T_f))
    return CheckRun(records, residual=float(resid), trend_ok=trend_ok, trend_slope=slope, c_mod=c_mod)


def _is_constant(a):
    return isinstance(a, Rational) and len(a.numer) == 1 and len(a.denom) == 1


def _as_target_poly(a):
    if _is_constant(a):
        return DiffPoly.factor() - complex(a.lead)
    return DiffPoly.factor() - DiffPoly.coefficient(a)


def mohonko_check(P, a, f, r_grid, delta, epsilon, threshold=0.05, seed=42, settings=None,
                  executor=None):
    """Numerical Mohon'ko-type check: m(r, 1/(f - a)) for a solution of P(z,f) = 0."""
    P = _as_poly(P)
    r_grid = sorted(r_grid)
    resid = relative_residual(P, f, _sample_points(r_grid)).max()
    if not resid < 1e-6:
        raise EquationResidualError(f"equation residual {resid:.3g} exceeds 1e-6")
    rng = np.random.default_rng(seed)
    r_max = r_grid[-1]
    pts = r_max * np.sqrt(rng.uniform(size=64)) * np.exp(2j * np.pi * rng.uniform(size=64))
    vals = []
    for z in pts:
        v = evaluate_poly(P, a, z)
        vals.append(math.inf if isinstance(v, Pole) else abs(v.value if isinstance(v, Saturated) else v))
    if max(vals) <= 1e-8:
        raise TargetSatisfiesEquationError(f"target satisfies equation: P(z, {a}) vanishes identically")
    if _is_constant(a):
        T_a = max(math.log(abs(a.lead)), 0.0) if a.lead != 0 else 0.0
    else:
        T_a = characteristic(a, r_max, settings).T
    T_f_max = characteristic(f, r_max, settings).T
    if not T_a < 0.01 * T_f_max:
        raise SlowMovementError(f"T(r, a) = {T_a:.4g} is not below 0.01 T(r, f) = {0.01 * T_f_max:.4g}")
    g = _as_target_poly(a)
    c_mod = P.max_shift

    def row(r):
        lhs = composed_proximity(g, f, r, settings, reciprocal=True)
        T_r = characteristic(f, r, settings).T
        T_b = characteristic(f, r + c_mod, settings).T
        comp = T_b ** (1 + epsilon) / r ** delta + T_r
        return CheckRecord(r, lhs, comp, _ratio(lhs, comp), T_f=T_r)

    records = _parallel(row, r_grid, executor)
    records, trend_ok, slope = _assess(records, threshold, lambda rec: _ratio(rec.lhs, rec.T_f))
    return CheckRun(records, residual=float(resid), trend_ok=trend_ok, trend_slope=slope,
                    T_a=T_a, T_f=T_f_max, c_mod=c_mod)


def deficiency_estimate(records, T_series):
    """min of lhs/T over the top quartile of radii: an upper proxy for the deficiency."""
    kept = sorted((rec for rec in records if not rec.flagged_exceptional), key=lambda rec: rec.r)
    if len(kept) < 8:
        raise CheckError(f"need at least 8 non-flagged records, got {len(kept)}")
    rs, Ts = zip(*sorted(T_series))
    top = kept[-max(1, math.ceil(len(kept) / 4)):]
    return min(rec.lhs / float(np.interp(rec.r, rs, Ts)) for rec in top)


def valiron_mohonko_check(P, f, r_grid, tolerance=0.1, settings=None, executor=None):
    """T(r, P(z,f)) against deg(P) T(r, f) for an ordinary polynomial P in f."""
    P = _as_poly(P)
    if any(c != 0 for c in P.shifts):
        raise CheckError("valiron_mohonko_check needs a polynomial without shifts")
    if P.total_degree < 1:
        raise CheckError("P must have degree at least 1")
    d = P.total_degree

    def row(r):
        _, T_P = composed_characteristic(P, f, r, settings)
        T_r = characteristic(f, r, settings).T
        comp = d * T_r
        ratio = _ratio(T_P, comp)
        return CheckRecord(r, T_P, comp, ratio, passed=abs(ratio - 1) <= tolerance, T_f=T_r)

    return CheckRun(_parallel(row, sorted(r_grid), executor), degree=d)
