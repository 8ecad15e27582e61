"""Periodic solution operator for (φ_{p(t)}(u'))' = w and the fixed-point map G.

K sends a forcing w to the periodic u with u(0) = 0 solving the equation for
the zero-mean part of w: the flux φ(u') = a + ∫₀ᵗ w̃ is integrated once more,
and the flux constant a is the unique value giving u' zero mean.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BracketFailure, DomainError
from .periodic import ExponentField, Grid, PeriodicSample, integrate

__all__ = [
    "Rhs", "OperatorResult", "nemytskii", "proj_P", "proj_Q",
    "solve_flux_constant", "K_op", "G_map", "bvp_residual",
    "residual_vector", "centered_flux_difference", "sampled_forcing",
]


@dataclass(frozen=True)
class Rhs:
    """A vectorised right-hand side ℓ(t, x, y) with an admissible x-range.

    ``fn`` maps equally shaped arrays (t, x, y) to an array. Values of x must
    satisfy ``guard[0] < x < guard[1]``; outside, evaluation raises
    :class:`DomainError` instead of producing NaN. Optional ``dx``/``dy``
    give analytic partial derivatives; otherwise central differences are used.
    """

    fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    guard: tuple[float, float] = (-math.inf, math.inf)
    name: str = "ell"
    dx: Callable | None = field(default=None, compare=False)
    dy: Callable | None = field(default=None, compare=False)

    def check(self, x) -> None:
        x = np.asarray(x, dtype=float)
        bad = ~((x > self.guard[0]) & (x < self.guard[1]))
        if np.any(bad):
            idx = int(np.flatnonzero(np.atleast_1d(bad))[0])
            raise DomainError(f"{self.name}: argument {np.atleast_1d(x)[idx]!r} outside guard {self.guard}", idx)

    def __call__(self, t, x, y) -> np.ndarray:
        self.check(x)
        t, x, y = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(y, float))
        out = np.asarray(self.fn(t, x, y), dtype=float)
        out = np.broadcast_to(out, t.shape)
        if not np.all(np.isfinite(out)):
            idx = int(np.flatnonzero(~np.isfinite(np.atleast_1d(out)))[0])
            raise DomainError(f"{self.name}: non-finite value", idx)
        return out

    def partials(self, t, x, y) -> tuple[np.ndarray, np.ndarray]:
        """(∂ℓ/∂x, ∂ℓ/∂y) at the given points."""
        t, x, y = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(y, float))
        if self.dx is not None:
            lx = np.broadcast_to(np.asarray(self.dx(t, x, y), float), t.shape)
        else:
            hx = 1e-7 * (1.0 + np.abs(x))
            lo = x - hx
            one_sided = lo <= self.guard[0]
            lo = np.where(one_sided, x, lo)
            hi = x + hx
            lx = (self(t, hi, y) - self(t, lo, y)) / (hi - lo)
        if self.dy is not None:
            ly = np.broadcast_to(np.asarray(self.dy(t, x, y), float), t.shape)
        else:
            hy = 1e-7 * (1.0 + np.abs(y))
            ly = (self(t, x, y + hy) - self(t, x, y - hy)) / (2.0 * hy)
        return lx, ly

    def scaled(self, lam: float) -> "Rhs":
        fn, dx, dy = self.fn, self.dx, self.dy
        return Rhs(lambda t, x, y: lam * fn(t, x, y), self.guard, f"{lam:g}*{self.name}",
                   None if dx is None else (lambda t, x, y: lam * dx(t, x, y)),
                   None if dy is None else (lambda t, x, y: lam * dy(t, x, y)))


def sampled_forcing(sample: PeriodicSample) -> Callable[[np.ndarray], np.ndarray]:
    """Periodic piecewise-linear interpolant of a sample; exact at the nodes."""
    tg, vals, T = sample.grid.t, sample.values, sample.grid.T

    def forcing(t):
        t = np.asarray(t, dtype=float)
        return np.interp(np.mod(t, T), tg, vals)
    return forcing


@dataclass(frozen=True, eq=False)
class OperatorResult:
    u: PeriodicSample
    a_star: float
    residual: float


def nemytskii(ell: Rhs, v: PeriodicSample) -> PeriodicSample:
    """Pointwise ℓ(t_i, v_i, v'_i)."""
    if v.deriv is None:
        raise ValueError("Nemytskii map needs the derivative channel")
    return PeriodicSample(v.grid, ell(v.t, v.values, v.deriv))


def proj_P(v: PeriodicSample) -> PeriodicSample:
    return v.grid.constant(v.values[0])


def proj_Q(w: PeriodicSample) -> PeriodicSample:
    return w.grid.constant(integrate(w) / w.grid.T)


def solve_flux_constant(pf: ExponentField, Wtilde) -> float:
    """The unique a with ∫₀ᵀ φ⁻¹_{p(s)}(a + W̃(s)) ds = 0.

    Geometric bracket expansion from [-1, 1], bisection to width
    1e-14 (1 + |a|) and |A| <= 1e-13 T (or until the bracket stops shrinking),
    then one secant polish kept only if it improves |A|.
    """
    W = np.ascontiguousarray(Wtilde.values if hasattr(Wtilde, "values") else Wtilde, dtype=float)
    p = np.ascontiguousarray(pf.p)
    dt = pf.grid.dt

    def A(a: float) -> float:
        return kernels.flux_mismatch(p, W, a, dt)

    lo, hi = -1.0, 1.0
    Alo, Ahi = A(lo), A(hi)
    while Alo > 0.0:
        hi, Ahi = lo, Alo
        lo *= 2.0
        if abs(lo) > 1e12 or not math.isfinite(Alo):
            raise BracketFailure("flux constant: no sign change down to -1e12")
        Alo = A(lo)
    while Ahi < 0.0:
        lo, Alo = hi, Ahi
        hi *= 2.0
        if abs(hi) > 1e12 or not math.isfinite(Ahi):
            raise BracketFailure("flux constant: no sign change up to 1e12")
        Ahi = A(hi)
    if not (math.isfinite(Alo) and math.isfinite(Ahi)):
        raise BracketFailure("flux constant: non-finite mismatch")
    if Alo == 0.0:
        return lo
    if Ahi == 0.0:
        return hi
    T = pf.grid.T
    for _ in range(2200):
        # width alone is not enough: φ⁻¹ is only Hölder near 0 when p > 2
        if (hi - lo <= 1e-14 * (1.0 + max(abs(lo), abs(hi)))
                and min(abs(Alo), abs(Ahi)) <= 1e-13 * T):
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        Am = A(mid)
        if Am == 0.0:
            return mid
        if Am < 0.0:
            lo, Alo = mid, Am
        else:
            hi, Ahi = mid, Am
    best, Abest = (lo, Alo) if abs(Alo) <= abs(Ahi) else (hi, Ahi)
    if Ahi != Alo:
        sec = lo - Alo * (hi - lo) / (Ahi - Alo)
        if lo <= sec <= hi:
            As = A(sec)
            if abs(As) < abs(Abest):
                best = sec
    return best


def centered_flux_difference(pf: ExponentField, d: np.ndarray) -> np.ndarray:
    """(Φ_{i+1} − Φ_{i−1}) / 2Δ at every node, Φ = φ_{p}(d), periodic wrap at the ends."""
    flux = kernels.phi(pf.p, d)
    core = flux[:-1]
    diff = (np.roll(core, -1) - np.roll(core, 1)) / (2.0 * pf.grid.dt)
    return np.append(diff, diff[0])


def residual_vector(pf: ExponentField, ell: Rhs, u: PeriodicSample) -> np.ndarray:
    """Node-wise Dφ − ℓ(t_i, u_i, d_i) on all N+1 nodes (ends by periodic wrap)."""
    if u.deriv is None:
        raise ValueError("residual needs the derivative channel")
    return centered_flux_difference(pf, u.deriv) - ell(u.t, u.values, u.deriv)


def bvp_residual(pf: ExponentField, ell: Rhs, u: PeriodicSample) -> float:
    """Sup over interior nodes of |Dφ − ℓ|, Dφ the centred difference of φ(u'_i)."""
    if u.deriv is None:
        raise ValueError("residual needs the derivative channel")
    flux = kernels.phi(pf.p, u.deriv)
    dphi = (flux[2:] - flux[:-2]) / (2.0 * pf.grid.dt)
    i = slice(1, -1)
    r = dphi - ell(u.t[i], u.values[i], u.deriv[i])
    return float(np.max(np.abs(r)))


def _flux_solution(pf: ExponentField, wt: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Slope d, values u (u_0 = 0) and flux constant for a zero-mean nodal forcing."""
    W = kernels.cumtrapz(np.ascontiguousarray(wt), pf.grid.dt)
    W[-1] = 0.0  # ∫ w̃ = 0 exactly; drop roundoff so d closes for steep φ⁻¹
    a = solve_flux_constant(pf, W)
    d = kernels.phi_inv(pf.p, a + W)
    u = kernels.cumtrapz(np.ascontiguousarray(d), pf.grid.dt)
    return d, u, a


def K_op(pf: ExponentField, w: PeriodicSample) -> OperatorResult:
    """Periodic solution of (φ(u'))' = w̃ with u(0) = 0."""
    grid = pf.grid
    wbar = integrate(w) / grid.T
    wt = w.values - wbar
    d, u, a = _flux_solution(pf, wt)
    sample = PeriodicSample(grid, u, d)
    dphi = centered_flux_difference(pf, d)
    residual = float(np.max(np.abs(dphi[1:-1] - wt[1:-1])))
    return OperatorResult(sample, a, residual)


def G_map(pf: ExponentField, ell: Rhs, v: PeriodicSample, lam: float = 1.0) -> PeriodicSample:
    """v ↦ P v + Q N(v) + K N(v), with N the Nemytskii map of λℓ."""
    Nv = nemytskii(ell, v)
    w = PeriodicSample(v.grid, lam * Nv.values)
    q = integrate(w) / v.grid.T
    k = K_op(pf, w)
    return PeriodicSample(v.grid, v.values[0] + q + k.u.values, k.u.deriv)
