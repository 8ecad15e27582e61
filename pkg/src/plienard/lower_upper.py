"""Lower and upper solutions, the truncated problem and the bracketed solve.

For the singular equation (φ_{p(t)}(u'))' + f(u)u' + g(u) = h(t) a constant
lower solution α and an upper solution β = c_δ + v_δ built from a zero-mean
auxiliary problem bracket a periodic solution.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .bounds import BracketBounds, compute_bracket_bounds, compute_K
from .continuation import HomotopyOptions, homotopy_solve, solve_eps_problem
from .errors import (BracketViolation, DomainError, NotFound, PreconditionFailed,
                     ResidualCheckFailed, TailCheckFailed)
from .operator import Rhs, bvp_residual, centered_flux_difference, sampled_forcing
from .periodic import ExponentField, PeriodicSample, integrate, norms

__all__ = [
    "BracketPair", "MarginReport", "UpperConstruction", "gamma", "lienard_rhs",
    "modified_rhs", "verify_lower", "verify_upper", "solve_bracketed",
    "find_constant_lower", "build_upper", "bracket_tol", "extend_f0", "VERIFY_TOL",
]

VERIFY_TOL = 1e-9


def _arr(fn: Callable, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape)


@dataclass(frozen=True)
class MarginReport:
    """Node-wise residual r = (φ(v'))' + f(v)v' + g(v) − h of a candidate."""

    kind: str
    residual: np.ndarray
    extreme: float
    endpoint_gap: float
    tol: float

    @property
    def passes(self) -> bool:
        if self.kind == "lower":
            return self.extreme >= -self.tol and self.endpoint_gap >= -self.tol
        return self.extreme <= self.tol and self.endpoint_gap >= -self.tol

    @property
    def margin(self) -> float:
        """Slack of the residual inequality; positive means strict."""
        return self.extreme if self.kind == "lower" else -self.extreme


@dataclass(frozen=True, eq=False)
class BracketPair:
    alpha: PeriodicSample
    beta: PeriodicSample
    lower_report: MarginReport | None = None
    upper_report: MarginReport | None = None

    def __post_init__(self):
        a, b = self.alpha.values, self.beta.values
        if self.alpha.grid != self.beta.grid:
            raise ValueError("alpha and beta live on different grids")
        if np.any(a <= 0.0) or np.any(b <= 0.0):
            raise ValueError("lower and upper solutions must be positive")
        if np.any(a > b):
            i = int(np.flatnonzero(a > b)[0])
            raise ValueError(f"alpha exceeds beta at node {i}")


def gamma(pair: BracketPair, t_index, x):
    """Clamp x into [α(t), β(t)] at node(s) ``t_index``."""
    return np.clip(x, pair.alpha.values[t_index], pair.beta.values[t_index])


def _forcing(h) -> Callable:
    return sampled_forcing(h) if isinstance(h, PeriodicSample) else h


def lienard_rhs(f: Callable, g: Callable, h) -> Rhs:
    """ℓ(t, x, y) = h(t) − g(x) − f(x)y on x > 0."""
    hf = _forcing(h)
    return Rhs(lambda t, x, y: hf(t) - g(x) - f(x) * y, guard=(0.0, np.inf), name="lienard")


def modified_rhs(f: Callable, g: Callable, h, pair: BracketPair) -> Rhs:
    """ℓ*(t, x, y) = h − g(γ) − f(γ)y + x − γ with γ the clamp into [α, β]; defined on all of ℝ."""
    hf = _forcing(h)
    af, bf = sampled_forcing(pair.alpha), sampled_forcing(pair.beta)

    def fn(t, x, y):
        gm = np.clip(x, af(t), bf(t))
        return hf(t) - g(gm) - f(gm) * y + (x - gm)  # exact inside the bracket
    return Rhs(fn, name="truncated")


def _report(kind: str, pf: ExponentField, f, g, h: PeriodicSample, v: PeriodicSample,
            tol: float) -> MarginReport:
    if v.deriv is None:
        raise ValueError(f"{kind} solution needs the derivative channel")
    x = v.values
    if np.any(x <= 0.0):
        raise DomainError(f"{kind} solution leaves (0, inf)", int(np.flatnonzero(x <= 0.0)[0]))
    r = centered_flux_difference(pf, v.deriv) + _arr(f, x) * v.deriv + _arr(g, x) - h.values
    if not np.all(np.isfinite(r)):
        raise DomainError(f"{kind} residual is not finite", int(np.flatnonzero(~np.isfinite(r))[0]))
    d0, dT = v.deriv[0], v.deriv[-1]
    if kind == "lower":
        return MarginReport(kind, r, float(r.min()), float(d0 - dT), tol)
    return MarginReport(kind, r, float(r.max()), float(dT - d0), tol)


def verify_lower(pf: ExponentField, f, g, h: PeriodicSample, alpha: PeriodicSample,
                 tol: float = VERIFY_TOL) -> MarginReport:
    """Lower iff min r ≥ −tol and α'(0) ≥ α'(T)."""
    return _report("lower", pf, f, g, h, alpha, tol)


def verify_upper(pf: ExponentField, f, g, h: PeriodicSample, beta: PeriodicSample,
                 tol: float = VERIFY_TOL) -> MarginReport:
    """Upper iff max r ≤ tol and β'(0) ≤ β'(T)."""
    return _report("upper", pf, f, g, h, beta, tol)


def bracket_tol(beta: PeriodicSample) -> float:
    return 1e-8 * (1.0 + float(np.max(np.abs(beta.values))))


@dataclass(frozen=True, eq=False)
class BracketedSolution:
    u: PeriodicSample
    residual: float
    bounds: BracketBounds
    trace: list


def solve_bracketed(pf: ExponentField, f, g, h: PeriodicSample, pair: BracketPair,
                    tol: float = 1e-8) -> BracketedSolution:
    """Solve the truncated problem by continuation and certify it for the original one."""
    low = verify_lower(pf, f, g, h, pair.alpha)
    up = verify_upper(pf, f, g, h, pair.beta)
    if not low.passes:
        raise PreconditionFailed(f"alpha is not a lower solution (min residual {low.extreme:.3e})")
    if not up.passes:
        raise PreconditionFailed(f"beta is not an upper solution (max residual {up.extreme:.3e})")
    bb = compute_bracket_bounds(pair.alpha, pair.beta, f, g, h, pf.p_minus, pf.p_plus)
    ell_star = modified_rhs(f, g, h, pair)
    opts = HomotopyOptions(tol=tol, degree_interval=(-bb.M1, bb.M1))
    u, trace = homotopy_solve(pf, ell_star, bb.M0, opts)
    btol = bracket_tol(pair.beta)
    below = pair.alpha.values - btol - u.values
    above = u.values - pair.beta.values - btol
    if np.any(below > 0) or np.any(above > 0):
        i = int(np.argmax(np.maximum(below, above)))
        raise BracketViolation(f"solution leaves [alpha, beta] at node {i}")
    res = bvp_residual(pf, lienard_rhs(f, g, h), u)
    if not res <= tol:
        raise ResidualCheckFailed(f"original-equation residual {res:.3e} exceeds {tol:.1e}")
    return BracketedSolution(u, res, bb, trace)


def find_constant_lower(g: Callable, h: PeriodicSample | float,
                        search: tuple[float, float, int] = (1e-6, 1e3, 2001)) -> float:
    """Largest point of a log-spaced grid with g(α) ≥ max h.

    The largest qualifying point keeps α away from the singularity and gives
    the tightest bracket.
    """
    x_min, x_max, n = search
    if not (0 < x_min < x_max and n >= 2):
        raise ValueError("search needs 0 < x_min < x_max and n >= 2")
    hmax = float(np.max(h.values)) if isinstance(h, PeriodicSample) else float(h)
    xs = np.geomspace(x_min, x_max, int(n))
    with np.errstate(all="ignore"):
        gv = _arr(g, xs)
    ok = np.isfinite(gv) & (gv >= hmax)
    if not np.any(ok):
        raise NotFound(f"no α in [{x_min:g}, {x_max:g}] with g(α) ≥ max h = {hmax:.6g}")
    return float(xs[np.flatnonzero(ok)[-1]])


def extend_f0(f: Callable) -> Callable:
    """f on [0, ∞), frozen at f(0) for negative arguments."""
    f_at_0 = float(_arr(f, 0.0))

    def f0(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0.0, _arr(f, np.maximum(x, 0.0)), f_at_0)
    return f0


@dataclass(frozen=True, eq=False)
class UpperConstruction:
    beta: PeriodicSample
    v_delta: PeriodicSample
    c_delta: float
    K: float
    delta: float
    hbar: float
    report: MarginReport
    aux_residual: float


def tail_check(g: Callable, hbar: float, delta: float, K: float, n: int = 2001) -> float:
    """Margin min(h̄ − g) over [δ, δ + 10K]; raises TailCheckFailed if not positive."""
    xs = np.linspace(delta, delta + 10.0 * K, n)
    with np.errstate(all="ignore"):
        gv = _arr(g, xs)
    gap = hbar - gv
    if not np.all(np.isfinite(gv)) or np.any(gap <= 0.0):
        bad = np.flatnonzero(~(gap > 0.0))
        x = xs[bad[0]] if bad.size else xs[0]
        raise TailCheckFailed(f"g({x:.6g}) >= mean h = {hbar:.6g} on the tail check grid")
    return float(gap.min())


def build_upper(pf: ExponentField, f: Callable, g: Callable, h: PeriodicSample, delta: float,
                tol: float = 1e-8) -> UpperConstruction:
    """β = c_δ + v_δ with c_δ = δ + K and v_δ the zero-mean solution of
    (φ(v'))' + f₀(c_δ + v)v' = h̃."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    grid = pf.grid
    hbar = integrate(h) / grid.T
    htilde = PeriodicSample(grid, h.values - hbar)
    K = compute_K(grid.T, pf.p_minus, norms(htilde).L1).K
    tail_check(g, hbar, delta, K)
    c = delta + K
    f0 = extend_f0(f)

    def theta(x):
        return f0(c + np.asarray(x, dtype=float))
    v, trace = solve_eps_problem(pf, theta, htilde, 0.0, tol=tol)
    beta = PeriodicSample(grid, c + v.values, v.deriv)
    if np.any(beta.values < delta - 1e-10):
        raise PreconditionFailed(f"beta drops below delta (min {beta.values.min():.6g})")
    report = verify_upper(pf, f, g, h, beta)
    if not report.passes:
        raise PreconditionFailed(f"beta is not an upper solution (max residual {report.extreme:.3e})")
    return UpperConstruction(beta, v, c, K, delta, hbar, report, trace[-1].residual)
