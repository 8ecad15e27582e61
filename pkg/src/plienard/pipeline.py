"""Configuration, existence and nonexistence certificates, sweeps and export.

A run starts from a flat ``key = value`` configuration describing
(φ_{p(t)}(u'))' + f(u)u' + g(u) = h(t) on [0, T] and ends in a
:class:`Certificate` whose status is ``exists``, ``nonexistence`` or
``not_certified``.
"""

from __future__ import annotations

import csv
import logging
import math
import re
import warnings
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import expr as ex
from .bounds import BracketBounds, compute_K
from .continuation import HomotopyState, write_trace_csv
from .errors import (ConfigError, DomainError, EvalError, HypothesisFailure, NotFound,
                     PeriodicityError, PlienardError, TailCheckFailed)
from .lower_upper import (BracketPair, UpperConstruction, build_upper, find_constant_lower,
                          lienard_rhs, solve_bracketed, tail_check)
from .operator import residual_vector
from .periodic import ExponentField, Grid, PeriodicSample, integrate, norms

__all__ = [
    "ProblemConfig", "HypothesisReport", "Certificate", "VerifyResult",
    "parse_config", "load_config", "check_hypotheses", "solve_main", "nonexistence_check",
    "run_problem", "corollary_sweep", "export", "write_report", "write_solution_csv",
    "verify_csv", "report_text",
]

log = logging.getLogger("plienard")

MODES = ("solve", "corollary_sweep", "bounds_only", "verify")
NUMERIC_KEYS = {"T", "N", "delta", "alpha_min", "alpha_max", "alpha_n", "solve_tol", "cert_tol"}
EXPR_KEYS = {"p": ("t",), "f": ("x",), "g": ("x",), "h": ("t",)}
BOOL_KEYS = {"tail_asserted", "positivity_asserted"}
OTHER_KEYS = {"mode", "sweep_hbar"}
REQUIRED = ("T", "N", "p", "f", "g", "h")


# -- configuration ---------------------------------------------------------------

def _domain_safe(fn: Callable, var: str, params: dict[str, float]) -> Callable:
    """Compiled expression of one variable; evaluation errors surface as DomainError."""

    def call(v):
        v = np.asarray(v, dtype=float)
        try:
            out = fn(**{var: v}, **params)
        except EvalError as exc:
            raise DomainError(str(exc)) from None
        return np.broadcast_to(np.asarray(out, dtype=float), v.shape)
    return call


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    T: float
    N: int
    p_src: str
    f_src: str
    g_src: str
    h_src: str
    delta: float | None = None
    tail_asserted: bool = False
    positivity_asserted: bool = False
    alpha_search: tuple[float, float, int] = (1e-6, 1e3, 2001)
    solve_tol: float = 1e-8
    cert_tol: float = 1e-6
    mode: str = "solve"
    params: tuple[tuple[str, float], ...] = ()
    sweep_hbar: tuple[float, ...] = ()
    h_shift: float = 0.0
    lines: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pdict = dict(self.params)
        names = tuple(pdict)
        fns = {}
        for key in EXPR_KEYS:
            src = getattr(self, f"{key}_src")
            try:
                e = ex.parse_expr(src, names)
            except ex.ExprError as exc:
                raise ConfigError(f"cannot parse {key}: {exc}", key, self.lines.get(key)) from None
            rep = ex.validate(e, EXPR_KEYS[key] + names)
            if not rep.ok:
                raise ConfigError(f"{key} uses unknown symbols {', '.join(rep.names())}", key,
                                  self.lines.get(key))
            fns[key] = _domain_safe(ex.compile_expr(e), EXPR_KEYS[key][0], pdict)
        object.__setattr__(self, "_fns", fns)
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError("T must be positive and finite", "T", self.lines.get("T"))
        if int(self.N) != self.N or self.N < 16:
            raise ConfigError("N must be an integer >= 16", "N", self.lines.get("N"))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}", "mode", self.lines.get("mode"))
        lo, hi, n = self.alpha_search
        if not (0 < lo < hi and n >= 2):
            raise ConfigError("alpha search needs 0 < alpha_min < alpha_max and alpha_n >= 2",
                              "alpha_min", self.lines.get("alpha_min"))
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be positive", "delta", self.lines.get("delta"))
        if not (self.solve_tol > 0 and self.cert_tol > 0):
            raise ConfigError("tolerances must be positive", "solve_tol", self.lines.get("solve_tol"))
        self.exponent_field()  # validates p on the grid

    @property
    def grid(self) -> Grid:
        return Grid(self.T, int(self.N))

    def exponent_field(self, grid: Grid | None = None) -> ExponentField:
        grid = grid or self.grid
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return ExponentField.from_function(grid, self._fns["p"])
        except (ValueError, PeriodicityError, DomainError) as exc:
            raise ConfigError(f"invalid exponent field: {exc}", "p", self.lines.get("p")) from None

    @property
    def f(self) -> Callable:
        return self._fns["f"]

    @property
    def g(self) -> Callable:
        return self._fns["g"]

    def h(self, t):
        return self._fns["h"](t) + self.h_shift

    def h_sample(self, grid: Grid | None = None) -> PeriodicSample:
        grid = grid or self.grid
        return grid.sample(self.h)

    def with_overrides(self, **kw) -> "ProblemConfig":
        return replace(self, **kw)


_LINE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_.]*)\s*=\s*(.*?)\s*$")


def _unquote(raw: str, key: str, line: int) -> str:
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    raise ConfigError("expected a quoted expression", key, line)


def _number(raw: str, key: str, line: int) -> float:
    try:
        v = float(raw.strip("\"'"))
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}", key, line) from None
    if not math.isfinite(v):
        raise ConfigError("value must be finite", key, line)
    return v


def parse_config(text: str) -> ProblemConfig:
    """Parse configuration text; see :func:`load_config`."""
    raw: dict[str, tuple[str, int]] = {}
    params: dict[str, float] = {}
    lines: dict[str, int] = {}
    for no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        m = _LINE_RE.match(body)
        if not m:
            raise ConfigError(f"cannot parse line {body!r}", None, no)
        key, val = m.group(1), m.group(2)
        if key.startswith("param."):
            name = key[len("param."):]
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("t", "x", "pi") \
                    or name in ex.FUNCTIONS:
                raise ConfigError(f"invalid parameter name {name!r}", key, no)
            params[name] = _number(val, key, no)
            lines[key] = no
            continue
        if key not in NUMERIC_KEYS | set(EXPR_KEYS) | BOOL_KEYS | OTHER_KEYS:
            raise ConfigError("unknown key", key, no)
        if key in raw:
            raise ConfigError("duplicate key", key, no)
        raw[key] = (val, no)
        lines[key] = no
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError("missing required key", key, None)

    kw: dict = {"lines": lines, "params": tuple(params.items())}
    for key in EXPR_KEYS:
        val, no = raw[key]
        kw[f"{key}_src"] = _unquote(val, key, no)
    kw["T"] = _number(raw["T"][0], "T", raw["T"][1])
    n = _number(raw["N"][0], "N", raw["N"][1])
    if n != int(n):
        raise ConfigError("N must be an integer", "N", raw["N"][1])
    kw["N"] = int(n)
    if "delta" in raw:
        kw["delta"] = _number(raw["delta"][0], "delta", raw["delta"][1])
    for key in BOOL_KEYS:
        if key in raw:
            v, no = raw[key]
            v = v.strip("\"'").lower()
            if v not in ("true", "false"):
                raise ConfigError("expected true or false", key, no)
            kw[key] = v == "true"
    for key in ("solve_tol", "cert_tol"):
        if key in raw:
            kw[key] = _number(raw[key][0], key, raw[key][1])
    lo, hi, cnt = ProblemConfig.alpha_search
    if "alpha_min" in raw:
        lo = _number(raw["alpha_min"][0], "alpha_min", raw["alpha_min"][1])
    if "alpha_max" in raw:
        hi = _number(raw["alpha_max"][0], "alpha_max", raw["alpha_max"][1])
    if "alpha_n" in raw:
        cnt = _number(raw["alpha_n"][0], "alpha_n", raw["alpha_n"][1])
        if cnt != int(cnt):
            raise ConfigError("alpha_n must be an integer", "alpha_n", raw["alpha_n"][1])
    kw["alpha_search"] = (lo, hi, int(cnt))
    if "mode" in raw:
        kw["mode"] = raw["mode"][0].strip("\"'")
    if "sweep_hbar" in raw:
        val, no = raw["sweep_hbar"]
        body = val.strip("\"'").strip().strip("[]")
        items = [s for s in re.split(r"[,\s]+", body) if s]
        kw["sweep_hbar"] = tuple(_number(s, "sweep_hbar", no) for s in items)
    return ProblemConfig(**kw)


def load_config(path: str | Path) -> ProblemConfig:
    """Read a flat ``key = value`` file.

    Numbers are bare; expressions are quoted (``p = "3 + sin(2*pi*t)"``);
    ``param.NAME = value`` binds a named constant usable in expressions.
    Every violation raises :class:`ConfigError` naming the key and line.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg = parse_config(text)
    log.info("config %s: T=%r N=%d p=%r f=%r g=%r h=%r delta=%r tail_asserted=%r "
             "alpha_search=%r solve_tol=%r cert_tol=%r mode=%s params=%r",
             path, cfg.T, cfg.N, cfg.p_src, cfg.f_src, cfg.g_src, cfg.h_src, cfg.delta,
             cfg.tail_asserted, cfg.alpha_search, cfg.solve_tol, cfg.cert_tol, cfg.mode,
             dict(cfg.params))
    return cfg


# -- hypotheses ------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisReport:
    hbar: float
    hmax: float
    htilde_L1: float
    K: float
    alpha: float | None
    alpha_msg: str
    delta: float | None
    delta_auto: bool
    tail_ok: bool
    tail_margin: float | None
    tail_msg: str
    tail_asserted: bool

    @property
    def alpha_ok(self) -> bool:
        return self.alpha is not None

    @property
    def passes(self) -> bool:
        return self.alpha_ok and self.tail_ok and self.tail_asserted and self.hbar > 0


def _auto_delta(g: Callable, hbar: float, K: float, start: float) -> tuple[float, float]:
    """Smallest log-grid point above ``start`` whose tail sample passes with margin 5% of h̄."""
    for d in np.geomspace(max(start, 1e-6), 1e6, 481):
        try:
            m = tail_check(g, hbar, float(d), K)
        except (TailCheckFailed, DomainError):
            continue
        if m >= 0.05 * abs(hbar):
            return float(d), m
    raise TailCheckFailed(f"no delta up to 1e6 with g < mean h = {hbar:.6g} on the tail grid")


def check_hypotheses(cfg: ProblemConfig) -> HypothesisReport:
    """Constant lower solution, tail sample check and the sign of h̄. Failures are reported, not raised."""
    grid = cfg.grid
    pf = cfg.exponent_field()
    h = cfg.h_sample(grid)
    hbar = integrate(h) / grid.T
    hmax = float(h.values.max())
    htl1 = norms(PeriodicSample(grid, h.values - hbar)).L1
    K = compute_K(grid.T, pf.p_minus, htl1).K
    try:
        alpha = find_constant_lower(cfg.g, h, cfg.alpha_search)
        amsg = f"g(alpha) = {_f(float(cfg.g(alpha)))} >= max h = {_f(hmax)}"
    except (NotFound, DomainError) as exc:
        alpha, amsg = None, str(exc)
    delta, auto = cfg.delta, cfg.delta is None
    margin, ok = None, False
    try:
        if delta is None:
            delta, margin = _auto_delta(cfg.g, hbar, K, alpha if alpha is not None else cfg.alpha_search[0])
        else:
            margin = tail_check(cfg.g, hbar, delta, K)
        ok = True
        tmsg = f"g < mean h on [{_f(delta)}, {_f(delta + 10 * K)}], margin {_f(margin)}"
    except (TailCheckFailed, DomainError) as exc:
        tmsg = str(exc)
    return HypothesisReport(hbar, hmax, htl1, K, alpha, amsg, delta, auto, ok, margin, tmsg,
                            cfg.tail_asserted)


# -- certificates --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Certificate:
    status: str
    config: ProblemConfig
    solution: PeriodicSample | None = None
    residual: float | None = None
    alpha: float | None = None
    beta: PeriodicSample | None = None
    hypotheses: HypothesisReport | None = None
    upper: UpperConstruction | None = None
    bracket_bounds: BracketBounds | None = None
    trace: tuple[HomotopyState, ...] = ()
    reason: str = ""
    positivity_grid: tuple[float, float, int] | None = None

    def recheck(self) -> bool:
        """Re-evaluate the certificate's defining claim from its stored data."""
        if self.status == "exists":
            u = self.solution
            res = _residual_from_values(self.config, u.t, u.values, u.deriv)
            return (res <= self.config.cert_tol and float(u.values.min()) > 0
                    and float(u.values.min()) >= self.alpha - 1e-10
                    and abs(u.values[0] - u.values[-1]) <= 1e-9 * (1 + np.abs(u.values).max()))
        if self.status == "nonexistence":
            return _positivity_ok(self.config.g, self.positivity_grid) and _hbar(self.config) <= 0.0
        return True


def _hbar(cfg: ProblemConfig) -> float:
    return integrate(cfg.h_sample()) / cfg.T


def _positivity_grid(cfg: ProblemConfig) -> tuple[float, float, int]:
    return (cfg.alpha_search[0], cfg.alpha_search[1], 4001)


def _positivity_ok(g: Callable, grid: tuple[float, float, int]) -> bool:
    xs = np.geomspace(*grid[:2], grid[2])
    try:
        with np.errstate(all="ignore"):
            gv = g(xs)
    except DomainError:
        return False
    return bool(np.all(np.isfinite(gv)) and np.all(gv > 0.0))


def nonexistence_check(cfg: ProblemConfig) -> Certificate | None:
    """Integral obstruction: mean g(u) = h̄ ≤ 0 is impossible for g > 0.

    Applies only when g is positive on the sample grid and positivity is asserted;
    returns None otherwise or when h̄ > 0.
    """
    grid = _positivity_grid(cfg)
    if not (cfg.positivity_asserted and _positivity_ok(cfg.g, grid)):
        return None
    hbar = _hbar(cfg)
    if hbar > 0.0:
        return None
    reason = (f"mean of g(u) over a period equals mean h = {_f(hbar)} <= 0, "
              "impossible for g > 0")
    return Certificate("nonexistence", cfg, reason=reason, positivity_grid=grid)


def solve_main(cfg: ProblemConfig, strict: bool = False) -> Certificate:
    """Constant lower solution, constructed upper solution, bracketed solve.

    Hypothesis failures raise :class:`HypothesisFailure` when ``strict``;
    otherwise they, and every numerical failure, give ``not_certified``.
    """
    hyp = check_hypotheses(cfg)
    if not hyp.passes:
        why = []
        if not hyp.alpha_ok:
            why.append(f"lower solution: {hyp.alpha_msg}")
        if not hyp.tail_ok:
            why.append(f"tail: {hyp.tail_msg}")
        if not hyp.tail_asserted:
            why.append("tail hypothesis not asserted (tail_asserted = false)")
        if hyp.hbar <= 0:
            why.append(f"mean h = {_f(hyp.hbar)} is not positive")
        msg = "; ".join(why)
        if strict:
            raise HypothesisFailure(msg)
        return Certificate("not_certified", cfg, hypotheses=hyp, alpha=hyp.alpha, reason=msg)
    grid = cfg.grid
    pf = cfg.exponent_field(grid)
    h = cfg.h_sample(grid)
    try:
        up = build_upper(pf, cfg.f, cfg.g, h, hyp.delta, tol=cfg.solve_tol)
        pair = BracketPair(grid.constant(hyp.alpha), up.beta)
        sol = solve_bracketed(pf, cfg.f, cfg.g, h, pair, tol=cfg.solve_tol)
    except (PlienardError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return Certificate("not_certified", cfg, hypotheses=hyp, alpha=hyp.alpha,
                           reason=f"{type(exc).__name__}: {exc}")
    u = sol.u
    cert = Certificate("exists", cfg, u, sol.residual, hyp.alpha, up.beta, hyp, up, sol.bounds,
                       tuple(sol.trace))
    if not cert.recheck():
        return replace(cert, status="not_certified",
                       reason="solution failed residual, positivity or closure re-check")
    return cert


def run_problem(cfg: ProblemConfig) -> Certificate:
    """Nonexistence obstruction first, otherwise the existence pipeline."""
    cert = nonexistence_check(cfg)
    return cert if cert is not None else solve_main(cfg)


def corollary_sweep(cfg: ProblemConfig, hbar_values: Sequence[float] | None = None,
                    max_workers: int | None = None) -> list[tuple[float, Certificate]]:
    """Run every h = value + h̃₀ (h̃₀ the zero-mean part of the configured h), in input order."""
    values = list(cfg.sweep_hbar if hbar_values is None else hbar_values)
    if not values:
        return []
    base = _hbar(cfg) - cfg.h_shift

    def row(v: float) -> Certificate:
        return run_problem(replace(cfg, h_shift=float(v) - base))
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(zip(values, pool.map(row, values)))


# -- export and verification --------------------------------------------------------

def _f(x: float | None) -> str:
    return "none" if x is None else format(float(x), ".17g")


def _residual_from_values(cfg: ProblemConfig, t, u, du) -> float:
    grid = cfg.grid
    if len(u) != grid.N + 1:
        grid = Grid(cfg.T, len(u) - 1)
    pf = cfg.exponent_field(grid)
    s = PeriodicSample(grid, u, du)
    ell = lienard_rhs(cfg.f, cfg.g, cfg.h)
    r = residual_vector(pf, ell, s)
    return float(np.max(np.abs(r[1:-1])))


def write_solution_csv(cert: Certificate, path: str | Path) -> Path:
    u = cert.solution
    cfg = cert.config
    pf = cfg.exponent_field(u.grid)
    r = residual_vector(pf, lienard_rhs(cfg.f, cfg.g, cfg.h), u)
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u", "du", "residual"])
        for row in zip(u.t, u.values, u.deriv, r):
            w.writerow([f"{v:.16e}" for v in row])
    return path


def report_text(cert: Certificate) -> str:
    cfg = cert.config
    out = ["HYPOTHESES"]
    out += [f"  T = {_f(cfg.T)}", f"  N = {cfg.N}", f"  p = {cfg.p_src}", f"  f = {cfg.f_src}",
            f"  g = {cfg.g_src}", f"  h = {cfg.h_src}", f"  h_shift = {_f(cfg.h_shift)}"]
    for name, val in cfg.params:
        out.append(f"  param.{name} = {_f(val)}")
    hyp = cert.hypotheses
    if hyp is not None:
        out += [f"  mean h = {_f(hyp.hbar)}", f"  max h = {_f(hyp.hmax)}",
                f"  lower solution: alpha = {_f(hyp.alpha)} ({hyp.alpha_msg})",
                f"  tail check: {'pass' if hyp.tail_ok else 'fail'}; delta = {_f(hyp.delta)}"
                f"{' (auto)' if hyp.delta_auto else ''}; {hyp.tail_msg}",
                f"  tail asserted = {str(hyp.tail_asserted).lower()}"]
    elif cert.status == "nonexistence":
        lo, hi, n = cert.positivity_grid
        out += [f"  mean h = {_f(_hbar(cfg))}",
                f"  g > 0 on {n} log-spaced points of [{_f(lo)}, {_f(hi)}]",
                f"  positivity asserted = {str(cfg.positivity_asserted).lower()}"]
    out.append("BOUNDS")
    if hyp is not None:
        out += [f"  htilde L1 = {_f(hyp.htilde_L1)}", f"  K = {_f(hyp.K)}"]
    if cert.upper is not None:
        up = cert.upper
        out += [f"  c_delta = {_f(up.c_delta)}",
                f"  sup |v_delta| = {_f(np.abs(up.v_delta.values).max())}",
                f"  beta min = {_f(up.beta.values.min())}", f"  beta max = {_f(up.beta.values.max())}",
                f"  upper residual max = {_f(up.report.extreme)}"]
    if cert.bracket_bounds is not None:
        for k, v in cert.bracket_bounds.as_dict().items():
            out.append(f"  {k} = {_f(v)}")
    out.append("SOLUTION")
    if cert.solution is not None:
        u = cert.solution
        out += [f"  nodes = {u.grid.N + 1}", f"  min u = {_f(u.values.min())}",
                f"  max u = {_f(u.values.max())}", f"  max |du| = {_f(np.abs(u.deriv).max())}",
                f"  continuation steps = {len(cert.trace)}"]
    else:
        out.append("  none")
    out += ["CERTIFICATE", f"  status = {cert.status}"]
    if cert.residual is not None:
        out += [f"  residual = {_f(cert.residual)}", f"  cert_tol = {_f(cfg.cert_tol)}"]
    if cert.reason:
        out.append(f"  reason = {cert.reason}")
    return "\n".join(out) + "\n"


def write_report(cert: Certificate, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(report_text(cert), encoding="utf-8")
    return path


def export(cert: Certificate, out_dir: str | Path, stem: str = "solution") -> dict[str, Path]:
    """Write ``{stem}.csv`` and ``{stem}_trace.csv`` (if solved) and ``{stem}_report.txt``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if cert.solution is not None:
        paths["csv"] = write_solution_csv(cert, out / f"{stem}.csv")
        if cert.trace:
            write_trace_csv(cert.trace, out / f"{stem}_trace.csv")
            paths["trace"] = out / f"{stem}_trace.csv"
    paths["report"] = write_report(cert, out / f"{stem}_report.txt")
    return paths


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    residual: float
    min_u: float
    alpha: float | None
    messages: tuple[str, ...]


def verify_csv(cfg: ProblemConfig, path: str | Path) -> VerifyResult:
    """Recompute the certificate from a solution CSV and the configuration alone."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "u", "du", "residual"]:
        raise ConfigError(f"{path}: not a solution CSV")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    t, u, du = data[:, 0], data[:, 1], data[:, 2]
    msgs = []
    n = len(u) - 1
    grid = Grid(cfg.T, n)
    if np.max(np.abs(t - grid.t)) > 1e-12 * cfg.T:
        msgs.append("time column does not match the configured grid")
    try:
        res = _residual_from_values(cfg, t, u, du)
    except (PlienardError, ValueError) as exc:
        return VerifyResult(False, math.inf, float(u.min()), None, (str(exc),))
    if not res <= cfg.cert_tol:
        msgs.append(f"residual {_f(res)} exceeds cert_tol {_f(cfg.cert_tol)}")
    try:
        alpha = find_constant_lower(cfg.g, PeriodicSample(grid, cfg.h(grid.t)), cfg.alpha_search)
    except (NotFound, DomainError):
        alpha = None
        msgs.append("no constant lower solution on the search grid")
    if alpha is not None and u.min() < alpha - 1e-10:
        msgs.append(f"min u = {_f(u.min())} below alpha = {_f(alpha)}")
    if u.min() <= 0:
        msgs.append("solution is not positive")
    return VerifyResult(not msgs, res, float(u.min()), alpha, tuple(msgs))
