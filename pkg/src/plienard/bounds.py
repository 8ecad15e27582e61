"""A priori constants: the ε-family chain R1..R, the uniform bound K,
and the bracket constants M1, M2, c3 of the lower/upper solution argument.

Every constructor re-substitutes its result into the defining relation and
raises :class:`SelfCheckFailed` if it does not hold.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .errors import SelfCheckFailed
from .periodic import PeriodicSample
from .scalar import bisect, positive_root_increasing

__all__ = [
    "AprioriConstants", "UniformBoundK", "BracketBounds",
    "compute_R1", "compute_chain", "compute_K", "compute_M1", "compute_c3_M2",
    "compute_bracket_bounds", "sup_abs_on_interval", "STRICT_MARGIN",
]

STRICT_MARGIN = 1e-9
EQ_RTOL = 1e-12


def _r1_equation(T: float, p: float, tilde_e_L1: float) -> Callable[[float], float]:
    b = tilde_e_L1 * T ** ((p - 1.0) / p)
    return lambda x: x ** p - b * x - T


def _k_equation(T: float, p: float, e_L1: float) -> Callable[[float], float]:
    c = T ** (p - 1.0)
    return lambda x: x ** p - c * (T + e_L1 * x)


def _equation_holds(fn: Callable[[float], float], x: float, scale: float) -> bool:
    return abs(fn(x)) <= EQ_RTOL * max(1.0, scale)


def compute_R1(T: float, p_minus: float, tilde_e_L1: float) -> float:
    """Positive root of x^{p₋} − ‖ẽ‖₁ T^{(p₋−1)/p₋} x − T = 0."""
    if not (T > 0 and p_minus > 1 and tilde_e_L1 >= 0):
        raise ValueError("need T > 0, p_minus > 1, ‖ẽ‖ >= 0")
    fn = _r1_equation(T, p_minus, tilde_e_L1)
    x = positive_root_increasing(fn)
    if not _equation_holds(fn, x, x ** p_minus + T):
        raise SelfCheckFailed(f"R1 = {x!r} leaves residual {fn(x):.3e}")
    return x


def sup_abs_on_interval(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                        n: int = 10_001) -> float:
    """max |fn| on [lo, hi]: uniform grid, then a parabolic step through the best three points."""
    if hi <= lo:
        return float(abs(np.asarray(fn(np.array([lo])), dtype=float)[0]))
    xs = np.linspace(lo, hi, n)
    vals = np.abs(np.broadcast_to(np.asarray(fn(xs), dtype=float), xs.shape))
    k = int(np.argmax(vals))
    best = float(vals[k])
    if 0 < k < n - 1:
        y0, y1, y2 = vals[k - 1], vals[k], vals[k + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom < 0.0:
            h = xs[1] - xs[0]
            xv = xs[k] + 0.5 * h * (y0 - y2) / denom
            xv = min(max(xv, xs[k - 1]), xs[k + 1])
            best = max(best, float(abs(np.asarray(fn(np.array([xv])), dtype=float)[0])))
    return best


@dataclass(frozen=True)
class AprioriConstants:
    R1: float
    R2: float
    R3: float
    R4: float
    R: float
    eps_star: float
    T: float
    p_minus: float
    tilde_e_L1: float
    e_L1: float
    theta_sup: float

    def failures(self) -> list[str]:
        out = []
        fn = _r1_equation(self.T, self.p_minus, self.tilde_e_L1)
        if not _equation_holds(fn, self.R1, self.R1 ** self.p_minus + self.T):
            out.append("R1 equation")
        if not math.isclose(self.R2, self.T ** ((self.p_minus - 1) / self.p_minus) * self.R1, rel_tol=1e-14):
            out.append("R2 = T^{(p-1)/p} R1")
        r3 = max(self.e_L1 + self.R2 * self.theta_sup + self.eps_star * self.R2 * self.T, 1.0)
        if not math.isclose(self.R3, r3, rel_tol=1e-14):
            out.append("R3 definition")
        if not math.isclose(self.R4, self.R3 ** (1.0 / (self.p_minus - 1.0)), rel_tol=1e-14):
            out.append("R4 = R3^{1/(p-1)}")
        if not math.isclose(self.R, self.R2 + self.R4 + 1.0, rel_tol=1e-14):
            out.append("R = R2 + R4 + 1")
        return out

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in ("R1", "R2", "R3", "R4", "R", "eps_star", "T",
                                              "p_minus", "tilde_e_L1", "e_L1", "theta_sup")}


def compute_chain(R1: float, T: float, p_minus: float, e_L1: float,
                  theta: Callable[[np.ndarray], np.ndarray], eps_star: float,
                  tilde_e_L1: float | None = None) -> AprioriConstants:
    """R2, R3, R4 and R from R1 for the ε-family with ε ≤ eps_star.

    ``tilde_e_L1`` (the norm R1 was computed from) defaults to ``e_L1``;
    they coincide for zero-mean forcing.
    """
    if eps_star <= 0:
        raise ValueError("eps_star must be positive")
    R2 = T ** ((p_minus - 1.0) / p_minus) * R1
    theta_sup = sup_abs_on_interval(theta, -R2, R2)
    R3 = max(e_L1 + R2 * theta_sup + eps_star * R2 * T, 1.0)
    R4 = R3 ** (1.0 / (p_minus - 1.0))
    out = AprioriConstants(R1, R2, R3, R4, R2 + R4 + 1.0, eps_star, T, p_minus,
                           e_L1 if tilde_e_L1 is None else tilde_e_L1, e_L1, theta_sup)
    bad = out.failures()
    if bad:
        raise SelfCheckFailed(f"a priori chain fails: {', '.join(bad)}")
    return out


@dataclass(frozen=True)
class UniformBoundK:
    """Sup bound for zero-mean solutions of (φ(u'))' + θ(c+u)u' = e, any θ and c."""

    K: float
    T: float
    p_minus: float
    e_L1: float

    def satisfied(self) -> bool:
        fn = _k_equation(self.T, self.p_minus, self.e_L1)
        return _equation_holds(fn, self.K, self.K ** self.p_minus)


def compute_K(T: float, p_minus: float, e_L1: float) -> UniformBoundK:
    """Positive root of x^{p₋} = T^{p₋−1}(T + ‖e‖₁ x).

    Follows from ‖u‖∞ = ‖ũ‖∞ ≤ ‖u'‖₁ ≤ T^{(p₋−1)/p₋}‖u'‖_{p₋} and
    ‖u'‖_{p₋}^{p₋} ≤ T + ‖e‖₁‖u‖∞.
    """
    if not (T > 0 and p_minus > 1 and e_L1 >= 0):
        raise ValueError("need T > 0, p_minus > 1, ‖e‖ >= 0")
    fn = _k_equation(T, p_minus, e_L1)
    K = positive_root_increasing(fn, start=max(T, 1e-3))
    out = UniformBoundK(K, T, p_minus, e_L1)
    if not out.satisfied():
        raise SelfCheckFailed(f"K = {K!r} leaves residual {fn(K):.3e}")
    return out


def _m1_conditions(M1: float, alpha: np.ndarray, beta: np.ndarray, g_alpha: np.ndarray,
                   g_beta: np.ndarray, h: np.ndarray) -> tuple[float, float]:
    """(min of the upper condition, max of the lower condition) over nodes."""
    upper = h - g_beta + M1 - beta
    lower = h - g_alpha - M1 - alpha
    return float(upper.min()), float(lower.max())


def compute_M1(alpha: PeriodicSample, beta: PeriodicSample, g: Callable, h: PeriodicSample) -> float:
    """Smallest M1 = ‖β‖∞ + 2^k with h − g(β) + M1 − β > 0 > h − g(α) − M1 − α at every node."""
    a, b, hv = alpha.values, beta.values, h.values
    ga = np.asarray(g(a), dtype=float)
    gb = np.asarray(g(b), dtype=float)
    base = float(np.max(np.abs(b)))
    for k in range(1100):
        M1 = base + 2.0 ** k
        up, low = _m1_conditions(M1, a, b, ga, gb, hv)
        if up >= STRICT_MARGIN and low <= -STRICT_MARGIN:
            return M1
    raise SelfCheckFailed("M1 ladder did not terminate")  # unreachable for finite data


def _m2_gap(M2: float, M1: float, c3: float, T: float, p_minus: float, p_plus: float) -> float:
    return (M2 ** (p_minus - 1.0) - (2.0 * M1 / T + 1.0) ** (p_plus - 1.0)) / c3 - (T + 2.0 * M1)


def compute_c3_M2(M1: float, f: Callable, g: Callable, alpha: PeriodicSample, beta: PeriodicSample,
                  h: PeriodicSample, T: float, p_minus: float, p_plus: float,
                  band_points: int = 10_001) -> tuple[float, float]:
    """Growth constant c3 of the truncated right-hand side and the slope bound M2."""
    lo, hi = float(alpha.values.min()), float(beta.values.max())
    gmax = sup_abs_on_interval(g, lo, hi, band_points)
    fmax = sup_abs_on_interval(f, lo, hi, band_points)
    hsup = float(np.max(np.abs(h.values)))
    c3 = max(hsup + gmax + 2.0 * M1, fmax)

    def gap(m):
        return _m2_gap(m, M1, c3, T, p_minus, p_plus) - STRICT_MARGIN

    prev, M2 = 1.0, 2.0
    while gap(M2) < 0.0:
        prev, M2 = M2, 2.0 * M2
        if not math.isfinite(M2):
            raise SelfCheckFailed("M2 ladder overflowed")
    if prev < M2:
        # one bisection stage between the last failing and first passing rung
        lo_m, hi_m = prev, M2
        for _ in range(200):
            if hi_m - lo_m <= 1e-12 * hi_m:
                break
            mid = 0.5 * (lo_m + hi_m)
            if gap(mid) >= 0.0:
                hi_m = mid
            else:
                lo_m = mid
        M2 = hi_m
    if not (M2 > 1.0 and gap(M2) >= 0.0):
        raise SelfCheckFailed(f"M2 = {M2!r} fails its defining inequality")
    return c3, M2


@dataclass(frozen=True)
class BracketBounds:
    M1: float
    M2: float
    c3: float
    T: float
    p_minus: float
    p_plus: float
    beta_sup: float

    @property
    def M0(self) -> float:
        return self.M1 + self.M2

    def failures(self, alpha: PeriodicSample, beta: PeriodicSample, g: Callable,
                 h: PeriodicSample) -> list[str]:
        out = []
        if not self.M1 > self.beta_sup:
            out.append("M1 > ‖β‖∞")
        up, low = _m1_conditions(self.M1, alpha.values, beta.values,
                                 np.asarray(g(alpha.values), float), np.asarray(g(beta.values), float),
                                 h.values)
        if not (up >= STRICT_MARGIN and low <= -STRICT_MARGIN):
            out.append("M1 strict inequalities")
        if not self.M2 > 1.0:
            out.append("M2 > 1")
        if _m2_gap(self.M2, self.M1, self.c3, self.T, self.p_minus, self.p_plus) < STRICT_MARGIN:
            out.append("M2 inequality")
        return out

    def as_dict(self) -> dict[str, float]:
        return {"M1": self.M1, "M2": self.M2, "c3": self.c3, "M0": self.M0}


def compute_bracket_bounds(alpha: PeriodicSample, beta: PeriodicSample, f: Callable, g: Callable,
                           h: PeriodicSample, p_minus: float, p_plus: float) -> BracketBounds:
    T = alpha.grid.T
    M1 = compute_M1(alpha, beta, g, h)
    c3, M2 = compute_c3_M2(M1, f, g, alpha, beta, h, T, p_minus, p_plus)
    out = BracketBounds(M1, M2, c3, T, p_minus, p_plus, float(np.max(np.abs(beta.values))))
    bad = out.failures(alpha, beta, g, h)
    if bad:
        raise SelfCheckFailed(f"bracket bounds fail: {', '.join(bad)}")
    return out
