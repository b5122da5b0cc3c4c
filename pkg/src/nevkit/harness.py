"""Experiment configuration, built-in suites and CSV reports.

Each suite turns an :class:`ExperimentConfig` into a list of :class:`Row`
objects plus free-text notes. :func:`run` executes experiments, writes the CSV
and returns the process exit code:

    0  every non-flagged row passed
    1  at least one non-flagged row failed
    2  configuration error (including failed hypothesis gates of a check)
    3  numerical error, reported with the row that raised it
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

import numpy as np

from . import diffpoly, funcat, nevanlinna
from ._complexlit import format_complex, format_real, parse_complex
from .funcat import CatalogError, Rational, RootFindingError
from .nevanlinna import DomainError, characteristic
from .quadrature import DEFAULT_SETTINGS, QuadratureError

log = logging.getLogger(__name__)

SUITES = ("bound-grid", "sharpness", "expexp-ratio", "clunie", "mohonko", "valiron",
          "jensen", "borel", "poisson-jensen", "custom")
HEADER = ["suite", "function", "r", "lhs", "comparator", "ratio", "alpha", "delta", "c",
          "flagged", "pass"]
MIN_RADIUS = 0.1
EXPEXP_CAP = 5.0
HALF_PI_TAN = "tan[1.5707963267948966]"


class ConfigError(ValueError):
    pass


class NumericalError(ArithmeticError):
    def __init__(self, context, cause):
        self.context = context
        self.cause = cause
        super().__init__(f"{context}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    name: str = ""
    function: Optional[str] = None
    c: Optional[Tuple[complex, ...]] = None
    h: complex = 0j
    r_start: Optional[float] = None
    r_stop: Optional[float] = None
    r_count: Optional[int] = None
    r_log: Optional[bool] = None
    alpha: Optional[Tuple[float, ...]] = None
    delta: Optional[Tuple[float, ...]] = None
    epsilon: float = 0.1
    strict_statement: bool = False
    seed: int = 42
    out: str = "nevkit.csv"
    quad_tol: Optional[float] = None
    quad_max_nodes: Optional[int] = None
    threshold: float = 0.05
    n: int = 1
    P: Optional[str] = None
    Q: Optional[str] = None
    target: Optional[str] = None
    cases: Optional[int] = None
    workers: int = 1

    def settings(self):
        kw = {}
        if self.quad_tol is not None:
            kw.update(atol=self.quad_tol, rtol=self.quad_tol)
        if self.quad_max_nodes is not None:
            kw["max_nodes"] = self.quad_max_nodes
        return replace(DEFAULT_SETTINGS, **kw) if kw else DEFAULT_SETTINGS

    def grid(self, start, stop, count=24, log_spaced=True):
        """The configured r-grid, with suite defaults for unset parts."""
        start = start if self.r_start is None else self.r_start
        stop = stop if self.r_stop is None else self.r_stop
        count = count if self.r_count is None else self.r_count
        log_spaced = log_spaced if self.r_log is None else self.r_log
        if log_spaced:
            return [float(x) for x in np.geomspace(start, stop, count)]
        return [float(x) for x in np.linspace(start, stop, count)]

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.r_start is not None and self.r_start < MIN_RADIUS:
            raise ConfigError(f"r_start must be at least {MIN_RADIUS}")
        if self.r_count is not None and self.r_count < 2:
            raise ConfigError("r_count must be at least 2")
        if self.r_start is not None and self.r_stop is not None and self.r_stop <= self.r_start:
            raise ConfigError("r_stop must exceed r_start")
        if self.delta and not all(0 < d < 1 for d in self.delta):
            raise ConfigError("delta must lie in (0, 1)")
        if self.alpha and not all(a > 1 for a in self.alpha):
            raise ConfigError("alpha must exceed 1")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.quad_tol is not None and not self.quad_tol > 0:
            raise ConfigError("quad_tol must be positive")
        if self.quad_max_nodes is not None and self.quad_max_nodes < 2 ** 11:
            raise ConfigError("quad_max_nodes must be at least 2048")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for key in ("function", "target"):
            text = getattr(self, key)
            if text is not None:
                try:
                    funcat.parse_function(text)
                except CatalogError as exc:
                    raise ConfigError(f"{key}: {exc}") from None
        for key in ("P", "Q"):
            text = getattr(self, key)
            if text is not None:
                try:
                    diffpoly.parse(text)
                except diffpoly.ParseError as exc:
                    raise ConfigError(f"{key}: {exc}") from None
        return self


@dataclass(frozen=True)
class Row:
    suite: str
    function: str
    r: float
    lhs: float
    comparator: float
    ratio: float
    alpha: float = math.nan
    delta: float = math.nan
    c: Optional[complex] = None
    flagged: bool = False
    passed: bool = True

    def cells(self):
        def num(x):
            return "" if x is None or (isinstance(x, float) and math.isnan(x)) else format_real(x, 12)
        return [self.suite, self.function, num(self.r), num(self.lhs), num(self.comparator),
                num(self.ratio), num(self.alpha), num(self.delta),
                "" if self.c is None else format_complex(self.c, 12),
                "true" if self.flagged else "false", "true" if self.passed else "false"]

    @property
    def sort_key(self):
        nan_last = lambda x: (math.isnan(x), 0.0 if math.isnan(x) else x)
        c = self.c if self.c is not None else 0j
        return (self.suite, self.function, self.r, nan_last(self.alpha), nan_last(self.delta),
                c.real, c.imag)


@dataclass
class SuiteResult:
    rows: List[Row]
    notes: List[str] = field(default_factory=list)


# --------------------------------------------------------------------------
# helpers


def _ratio(a, b):
    return a / b if b != 0 else (0.0 if a == 0 else math.inf)


def _guard(context, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (QuadratureError, DomainError, RootFindingError, FloatingPointError, ZeroDivisionError) as exc:
        raise NumericalError(context, exc) from exc


def _map(cfg, fn, items):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def random_rational(rng, max_degree=4, radius=12.0):
    """Rational function with random zeros and poles, finite and nonzero at 0."""
    def points(k):
        mod = rng.uniform(0.2, radius, size=k)
        return mod * np.exp(2j * np.pi * rng.uniform(size=k))

    zeros = points(int(rng.integers(0, max_degree + 1)))
    poles = points(int(rng.integers(0, max_degree + 1)))
    lead = complex(rng.normal(), rng.normal())
    numer = tuple(complex(x) for x in lead * np.poly(zeros)) if len(zeros) else (lead,)
    denom = tuple(complex(x) for x in np.poly(poles)) if len(poles) else (1 + 0j,)
    return Rational(numer, denom)


def _functions(cfg, defaults):
    texts = [cfg.function] if cfg.function is not None else list(defaults)
    return [(t, funcat.parse_function(t)) for t in texts]


def _shifts(cfg, default):
    return list(cfg.c) if cfg.c is not None else list(default)


# --------------------------------------------------------------------------
# suites


def suite_jensen(cfg):
    rng = np.random.default_rng(cfg.seed)
    settings = cfg.settings()
    radii = cfg.grid(1, 10, 4, False) if cfg.r_start is not None else [1.0, 2.0, 5.0, 10.0]
    cases = [random_rational(rng) for _ in range(cfg.cases or 20)]
    rows = []
    for k, f in enumerate(cases):
        log_f0 = funcat.log_abs_at_origin(f)
        name = f"case{k:02d}:{f.to_text()}"

        def one(r, f=f, name=name, log_f0=log_f0):
            s = _guard(f"jensen {name} r={r}", characteristic, f, r, settings)
            lhs = s.T - s.T_inv
            return Row("jensen", name, r, lhs, log_f0, _ratio(lhs, log_f0),
                       passed=abs(lhs - log_f0) < 1e-6)

        rows += _map(cfg, one, radii)
    worst = max(abs(row.lhs - row.comparator) for row in rows)
    return SuiteResult(rows, [f"max Jensen residual {worst:.3e}"])


def suite_poisson_jensen(cfg):
    rng = np.random.default_rng(cfg.seed)
    settings = cfg.settings()
    rows = []
    k = 0
    while len(rows) < (cfg.cases or 40):
        f = random_rational(rng, radius=8.0)
        c = complex(*rng.uniform(-2, 2, size=2))
        alpha = float(rng.uniform(1.2, 4.0))
        r = float(rng.uniform(0.5, 10.0))
        z = r * np.exp(2j * np.pi * rng.uniform())
        try:
            terms = _pj_terms(f, c, alpha, z, r, settings)
        except DomainError:
            continue
        exact = float((f.log_value(z + c) - f.log_value(z)).real)
        name = f"case{k:02d}:{f.to_text()}"
        k += 1
        total = terms.total
        rows.append(Row("poisson-jensen", name, r, total, exact, _ratio(total, exact), alpha=alpha,
                        c=c, passed=abs(total - exact) < 1e-7))
    worst = max(abs(row.lhs - row.comparator) for row in rows)
    return SuiteResult(rows, [f"max Poisson-Jensen residual {worst:.3e}"])


def _pj_terms(f, c, alpha, z, r, settings):
    try:
        return nevanlinna.poisson_jensen_terms(f, c, alpha, z, r, settings)
    except QuadratureError as exc:
        raise NumericalError(f"poisson-jensen {f} c={c} r={r}", exc) from exc


BOUND_FUNCTIONS = ("mul(rat[1,0],gamma)", "exppoly[1,0]", "exppoly[1,0,0]", "shift(tan[1.5707963267948966],0.5)")


def suite_bound_grid(cfg):
    settings = cfg.settings()
    radii = cfg.grid(1, 20, 5) if cfg.r_start is not None else [1.0, 2.0, 5.0, 10.0, 20.0]
    alphas = list(cfg.alpha or (1.5, 2.0, 4.0))
    deltas = list(cfg.delta or (0.25, 0.5, 0.9))
    shifts = _shifts(cfg, (1, 1j, 2))
    rows = []
    for text, f in _functions(cfg, BOUND_FUNCTIONS):
        f, _ = funcat.normalize_origin(f)
        log_f0 = funcat.log_abs_at_origin(f)
        T_cache = {}

        def T_at(R, text=text, f=f, cache=T_cache):
            if R not in cache:
                cache[R] = _guard(f"bound-grid {text} T at {R}", characteristic, f, R, settings).T
            return cache[R]

        def cell(job, text=text, f=f, log_f0=log_f0, T_at=T_at):
            c, r = job
            lhs = _guard(f"bound-grid {text} c={c} r={r}",
                         nevanlinna.diff_quotient_proximity, f, c, r, settings)
            out = []
            for alpha in alphas:
                T_big = T_at(alpha * (r + abs(c)))
                for delta in deltas:
                    K = nevanlinna.lemma_constant(alpha, delta, abs(c))
                    rhs = nevanlinna.bound_rhs(K, r, delta, T_big, log_f0, cfg.strict_statement)
                    out.append(Row("bound-grid", text, r, lhs, rhs, _ratio(lhs, rhs), alpha, delta, c,
                                   passed=lhs <= rhs * (1 + 1e-9)))
            return out

        for chunk in _map(cfg, cell, [(c, r) for c in shifts for r in radii]):
            rows += chunk
    worst = max(row.ratio for row in rows)
    note = "strict statement: r^delta applied twice" if cfg.strict_statement else "r^delta applied once"
    return SuiteResult(rows, [note, f"max lhs/rhs {worst:.4g}"])


SHARPNESS_FUNCTIONS = ("gamma", "exppoly[1,0,0]", HALF_PI_TAN)


def power_fit(rs, values):
    """Least-squares (A, sigma) in values ~ A r^sigma over positive values."""
    pts = [(r, v) for r, v in zip(rs, values) if v > 0]
    if len(pts) < 2:
        raise NumericalError("sharpness fit", ValueError("fewer than two positive values"))
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    if np.ptp(x) == 0:
        raise NumericalError("sharpness fit", ValueError("degenerate radius set"))
    sigma, logA = np.polyfit(x, y, 1)
    return float(math.exp(logA)), float(sigma)


def suite_sharpness(cfg):
    settings = cfg.settings()
    radii = cfg.grid(2, 50)
    c = _shifts(cfg, (1,))[0]
    rows, notes = [], []
    for text, f in _functions(cfg, SHARPNESS_FUNCTIONS):
        lhs = _map(cfg, lambda r: _guard(f"sharpness {text} r={r}",
                                         nevanlinna.diff_quotient_proximity, f, c, r, settings), radii)
        A, sigma = power_fit(radii, lhs)
        notes.append(f"{text}: sigma={sigma:.6g} A={A:.6g}")
        for r, v in zip(radii, lhs):
            if text == "gamma" and c == 1:
                comp = math.log(r)
                ok = abs(v - comp) <= 1e-6 and (r < 5 or abs(v / comp - 1) <= 0.01)
            elif text == "exppoly[1,0,0]" and c == 1:
                comp = 2 * r / math.pi
                ok = 0.9 <= sigma <= 1.1 and abs(A / (2 / math.pi) - 1) <= 0.2
            elif text == HALF_PI_TAN and c == 1:
                comp = 1.0
                ok = v <= 1.0
            else:
                comp, ok = A * r ** sigma, True
            rows.append(Row("sharpness", text, r, v, comp, _ratio(v, comp), c=c, passed=ok))
    return SuiteResult(rows, notes)


def suite_expexp(cfg):
    settings = cfg.settings()
    radii = cfg.grid(1, 5, 5, False)
    notes = [f"radii capped at {EXPEXP_CAP:g}"]
    if max(radii) > EXPEXP_CAP:
        radii = [r for r in radii if r <= EXPEXP_CAP]
        notes.append("radii above the cap dropped")
    f = funcat.parse_function("exp(exppoly[1,0])")
    target = math.e - 1

    def one(r):
        lhs = _guard(f"expexp r={r}", nevanlinna.diff_quotient_proximity, f, 1, r, settings)
        T = _guard(f"expexp r={r}", characteristic, f, r, settings).T
        ratio = _ratio(lhs, T)
        return Row("expexp-ratio", f.to_text(), r, lhs, T, ratio, c=1 + 0j,
                   passed=abs(ratio / target - 1) <= 1e-3)

    return SuiteResult(_map(cfg, one, radii), notes)


def _check_rows(suite, f_text, run, c):
    rows = [Row(suite, f_text, rec.r, rec.lhs, rec.comparator, rec.ratio, c=c,
                flagged=rec.flagged_exceptional, passed=rec.passed) for rec in run]
    kept = [rec for rec in run if not rec.flagged_exceptional]
    last = kept[-1] if kept else None
    notes = [f"trend slope {run.meta.get('trend_slope', math.nan):.4g} "
             f"({'decaying' if run.meta.get('trend_ok') else 'not decaying'})"]
    if last is not None:
        notes.append(f"m/T at r={last.r:g}: {last.lhs / last.T_f:.4g}")
    if len(kept) >= 8:
        series = [(rec.r, rec.T_f) for rec in run]
        notes.append(f"deficiency estimate {diffpoly.deficiency_estimate(run, series):.4g}")
    return rows, notes


def _executor(cfg):
    return ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None


def suite_clunie(cfg):
    text = cfg.function or HALF_PI_TAN
    f = funcat.parse_function(text)
    P = diffpoly.parse(cfg.P or "f(z+1)")
    Q = diffpoly.parse(cfg.Q or "-1")
    radii = cfg.grid(2, 40)
    ex = _executor(cfg)
    try:
        run = _guard(f"clunie {text}", diffpoly.clunie_split_check, cfg.n, P, Q, f, radii,
                     (cfg.delta or (0.5,))[0], cfg.epsilon, cfg.threshold, cfg.settings(), ex)
    finally:
        if ex:
            ex.shutdown()
    rows, notes = _check_rows("clunie", text, run, run.meta["c_mod"])
    notes.insert(0, f"P={P} Q={Q} n={cfg.n} residual={run.meta['residual']:.3g}")
    notes.append(f"flagged log measure {run.log_measure:.4g}")
    return SuiteResult(rows, notes)


def suite_mohonko(cfg):
    text = cfg.function or HALF_PI_TAN
    f = funcat.parse_function(text)
    P = diffpoly.parse(cfg.P or "f(z)*f(z+1)+1")
    a = funcat.parse_function(cfg.target or "const[0]")
    radii = cfg.grid(2, 40)
    ex = _executor(cfg)
    try:
        run = _guard(f"mohonko {text}", diffpoly.mohonko_check, P, a, f, radii,
                     (cfg.delta or (0.5,))[0], cfg.epsilon, cfg.threshold, cfg.seed,
                     cfg.settings(), ex)
    finally:
        if ex:
            ex.shutdown()
    rows, notes = _check_rows("mohonko", text, run, run.meta["c_mod"])
    notes.insert(0, f"P={P} target={a} T(r,a)={run.meta['T_a']:.6g} T(r,f)={run.meta['T_f']:.6g}")
    notes.append(f"flagged log measure {run.log_measure:.4g}")
    return SuiteResult(rows, notes)


def suite_valiron(cfg):
    text = cfg.function or "exppoly[1,0]"
    f = funcat.parse_function(text)
    P = diffpoly.parse(cfg.P or "f(z)^2+f(z)")
    radii = cfg.grid(10, 50)
    ex = _executor(cfg)
    try:
        run = _guard(f"valiron {text}", diffpoly.valiron_mohonko_check, P, f, radii, 0.1,
                     cfg.settings(), ex)
    finally:
        if ex:
            ex.shutdown()
    rows = [Row("valiron", text, rec.r, rec.lhs, rec.comparator, rec.ratio, passed=rec.passed)
            for rec in run]
    return SuiteResult(rows, [f"P={P} degree={run.meta['degree']}"])


BOREL_FUNCTIONS = ("exppoly[1,0]", "rat[1,0,0,-2]/[1,0,4]")


def suite_borel(cfg):
    settings = cfg.settings()
    c = _shifts(cfg, (1,))[0]
    radii = cfg.grid(2, 50)
    rows, notes = [], []
    for text, f in _functions(cfg, BOREL_FUNCTIONS):
        samples = []
        for r in radii:
            T = _guard(f"borel {text} r={r}", characteristic, f, r + abs(c), settings).T
            samples.append((r, T))
        usable = [(r, T) for r, T in samples if T >= math.e]
        if len(usable) < len(samples):
            dropped = len(samples) - len(usable)
            msg = f"{text}: T(r+|c|) below e at {dropped} smallest radii; grid shrunk"
            log.warning(msg)
            notes.append(msg)

        def one(item, text=text, f=f):
            r, T = item
            alpha = nevanlinna.borel_alpha(r, abs(c), T, cfg.epsilon)
            big = _guard(f"borel {text} r={r}", characteristic, f, alpha * (r + abs(c)), settings).T
            ok = big <= 2 * T
            return Row("borel", text, r, big, 2 * T, _ratio(big, 2 * T), alpha=alpha, c=c,
                       flagged=not ok, passed=ok)

        part = _map(cfg, one, usable)
        measure = diffpoly.empirical_log_measure([row.r for row in part], [row.flagged for row in part])
        notes.append(f"{text}: flagged log measure {measure:.4g}")
        rows += part
    return SuiteResult(rows, notes)


def suite_custom(cfg):
    """Clunie check if P and Q are given, Mohon'ko if P and target, else the shift bound."""
    if cfg.P and cfg.Q:
        res = suite_clunie(cfg)
    elif cfg.P and cfg.target:
        res = suite_mohonko(cfg)
    else:
        if cfg.function is None:
            raise ConfigError("custom suite needs a function (or P with Q or target)")
        res = suite_bound_grid(replace(cfg, r_start=cfg.r_start or 1.0, r_stop=cfg.r_stop or 20.0,
                                       r_count=cfg.r_count or 5))
    return SuiteResult([replace(row, suite="custom") for row in res.rows], res.notes)


SUITE_FUNCS = {
    "bound-grid": suite_bound_grid,
    "sharpness": suite_sharpness,
    "expexp-ratio": suite_expexp,
    "clunie": suite_clunie,
    "mohonko": suite_mohonko,
    "valiron": suite_valiron,
    "jensen": suite_jensen,
    "borel": suite_borel,
    "poisson-jensen": suite_poisson_jensen,
    "custom": suite_custom,
}


# --------------------------------------------------------------------------
# config


_FLOAT_LISTS = {"alpha", "delta"}
_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
BOOL_WORDS = {"true": True, "yes": True, "1": True, "on": True,
              "false": False, "no": False, "0": False, "off": False}


def _coerce(key, raw):
    """Turn a config string into the field's value."""
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1]
    try:
        if key in _FLOAT_LISTS:
            return tuple(float(x) for x in text.split(","))
        if key == "c":
            return tuple(parse_complex(x.strip()) for x in text.split(","))
        if key == "h":
            return parse_complex(text)
        if key in ("r_log", "strict_statement"):
            if text.lower() not in BOOL_WORDS:
                raise ValueError(f"not a boolean: {text!r}")
            return BOOL_WORDS[text.lower()]
        if key in ("r_count", "seed", "quad_max_nodes", "n", "cases", "workers"):
            return int(text)
        if key in ("r_start", "r_stop", "epsilon", "quad_tol", "threshold"):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None
    return text


def make_config(values):
    """ExperimentConfig from a mapping of string (or typed) values."""
    unknown = set(values) - set(_TYPES)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "suite" not in values:
        raise ConfigError("missing 'suite'")
    kw = {k: (_coerce(k, v) if isinstance(v, str) else v) for k, v in values.items()}
    return ExperimentConfig(**kw).validate()


def load_config(text, overrides=None):
    """Parse INI-style text into a list of experiments, one per section.

    Keys outside any section apply to every experiment; ``overrides`` (from
    the command line) win over both.
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="defaults")
    parser.optionxform = str
    body = text if text.lstrip().startswith("[") else "[defaults]\n" + text
    try:
        parser.read_string(body)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    overrides = dict(overrides or {})
    sections = parser.sections() or [None]
    out = []
    for name in sections:
        values = dict(parser.defaults()) if name is None else dict(parser[name])
        values.update(overrides)
        if name is not None:
            values.setdefault("name", name)
        out.append(make_config(values))
    return out


# --------------------------------------------------------------------------
# run


def execute(cfg):
    cfg.validate()
    return SUITE_FUNCS[cfg.suite](cfg)


def render_csv(results):
    """CSV text for a list of (config, SuiteResult)."""
    buf = io.StringIO()
    for cfg, res in results:
        tag = f"{cfg.suite}" + (f" [{cfg.name}]" if cfg.name else "")
        notes = "; ".join(res.notes)
        buf.write(f"# nevkit {tag} seed={cfg.seed}" + (f"; {notes}" if notes else "") + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    rows = sorted((row for _, res in results for row in res.rows), key=lambda row: row.sort_key)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def read_csv(path):
    """Rows of an emitted CSV as dicts (comment lines skipped)."""
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def summarize(cfg, res):
    rows = res.rows
    kept = [row for row in rows if not row.flagged]
    passed = sum(row.passed for row in kept)
    measure = 0.0
    for name in sorted({row.function for row in rows}):
        part = sorted((row for row in rows if row.function == name), key=lambda row: row.r)
        if len({row.r for row in part}) == len(part):
            measure += diffpoly.empirical_log_measure([row.r for row in part], [row.flagged for row in part])
    finite = [row.ratio for row in rows if math.isfinite(row.ratio)]
    max_ratio = max(finite) if finite else math.nan
    tag = cfg.name or cfg.suite
    lines = [f"{tag}: {len(rows)} rows, {passed}/{len(kept)} non-flagged pass, "
             f"{len(rows) - len(kept)} flagged (log measure {measure:.4g}), max ratio {max_ratio:.6g}"]
    lines += [f"  {note}" for note in res.notes]
    return "\n".join(lines), all(row.passed for row in kept)


def run(configs, stdout=None, stderr=None):
    """Run experiments, write CSV files, print summaries; return the exit code."""
    import sys
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    by_path = {}
    ok = True
    for cfg in configs:
        try:
            res = execute(cfg)
        except ConfigError as exc:
            print(f"config error: {exc}", file=stderr)
            return 2
        except diffpoly.CheckError as exc:
            print(f"config error ({cfg.suite}): {exc}", file=stderr)
            return 2
        except NumericalError as exc:
            print(f"numerical error in {exc}", file=stderr)
            return 3
        text, good = summarize(cfg, res)
        print(text, file=stdout)
        ok &= good
        by_path.setdefault(cfg.out, []).append((cfg, res))
    for path, results in by_path.items():
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(results))
        print(f"wrote {path}", file=stdout)
    return 0 if ok else 1
