"""Averaged map, one-dimensional degree and λ-homotopy path following.

The homotopy deforms the averaged equation (λ → 0) into the full periodic
problem (φ_{p(t)}(u'))' = λ ℓ(t, u, u') at λ = 1. Each λ-problem is solved by
damped Newton on a collocated system: the centred flux difference is matched
against λℓ at the N periodic nodes, and u' is the Fourier derivative of u.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (BoundaryHit, BoundaryZero, DegreeZero, DomainError, NoBracket,
                     StepCollapse)
from .operator import G_map, Rhs, bvp_residual
from .periodic import ExponentField, Grid, PeriodicSample, integrate
from .scalar import bisect

__all__ = [
    "AveragedMap", "DegreeResult", "HomotopyOptions", "HomotopyState",
    "averaged_eval", "averaged_roots", "averaged_root", "brouwer_degree",
    "homotopy_solve", "write_trace_csv", "eps_rhs", "solve_eps_problem",
    "spectral_matrices", "EPS_REG",
]

EPS_REG = 1e-10
SCAN_POINTS = 512


# -- averaged map ------------------------------------------------------------

@dataclass(frozen=True)
class AveragedMap:
    """a ↦ (1/T) ∫₀ᵀ ℓ(t, a, 0) dt by the trapezoid rule on ``grid``."""

    ell: Rhs
    grid: Grid

    def __call__(self, a: float) -> float:
        t = self.grid.t
        vals = self.ell(t, np.full_like(t, a), np.zeros_like(t))
        return float(self.grid.dt * (vals.sum() - 0.5 * (vals[0] + vals[-1])) / self.grid.T)

    def scaled(self, c: float) -> "AveragedMap":
        return AveragedMap(self.ell.scaled(c), self.grid)


def averaged_eval(ell: Rhs, a: float, grid: Grid) -> float:
    return AveragedMap(ell, grid)(a)


def _scan_interval(ell: Rhs, interval: tuple[float, float] | None) -> tuple[float, float]:
    lo, hi = interval if interval is not None else ell.guard
    lo, hi = max(lo, ell.guard[0]), min(hi, ell.guard[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("averaged-root scan needs a bounded interval")
    # stay strictly inside a guard endpoint
    if lo <= ell.guard[0]:
        lo = lo + 1e-9 * (hi - lo) if lo != 0.0 else 1e-9 * hi
    if hi >= ell.guard[1]:
        hi = hi - 1e-9 * (hi - lo)
    if not hi > lo:
        raise ValueError(f"empty scan interval ({lo}, {hi})")
    return lo, hi


def _scan_points(lo: float, hi: float, n: int) -> np.ndarray:
    if lo > 0.0:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def averaged_roots(ell: Rhs, grid: Grid, interval: tuple[float, float] | None = None,
                   n: int = SCAN_POINTS) -> list[float]:
    """Every root of the averaged map found by a sign-change scan, ascending.

    Points where ℓ is not admissible are skipped. Raises :class:`NoBracket`
    when no sign change occurs on the scan grid.
    """
    L = AveragedMap(ell, grid)
    lo, hi = _scan_interval(ell, interval)
    xs = _scan_points(lo, hi, n)
    vals = []
    for x in xs:
        try:
            vals.append(L(float(x)))
        except DomainError:
            vals.append(math.nan)
    roots = []
    prev_x, prev_v = None, math.nan
    for x, v in zip(xs, vals):
        if math.isnan(v):
            prev_x, prev_v = None, math.nan
            continue
        if v == 0.0:
            roots.append(float(x))
        elif prev_x is not None and prev_v != 0.0 and (prev_v > 0) != (v > 0):
            roots.append(bisect(L, float(prev_x), float(x), flo=prev_v, fhi=v))
        prev_x, prev_v = x, v
    if not roots:
        raise NoBracket(f"averaged map has no sign change on [{lo:.6g}, {hi:.6g}]")
    return sorted(set(roots))


def averaged_root(ell: Rhs, grid: Grid, bracket: tuple[float, float] | None = None) -> float:
    """Smallest averaged root in ``bracket`` (default: the guard range)."""
    return averaged_roots(ell, grid, bracket)[0]


@dataclass(frozen=True)
class DegreeResult:
    interval: tuple[float, float]
    sign_left: int
    sign_right: int
    degree: int


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def brouwer_degree(L, R: float | tuple[float, float]) -> DegreeResult:
    """Degree of a scalar map on (−R, R), or on an explicit (lo, hi)."""
    lo, hi = (-R, R) if not isinstance(R, tuple) else R
    sl, sr = _sign(L(lo)), _sign(L(hi))
    if sl == 0 or sr == 0:
        raise BoundaryZero(f"averaged map vanishes at an endpoint of ({lo}, {hi})")
    return DegreeResult((lo, hi), sl, sr, (sr - sl) // 2)


# -- collocation corrector ---------------------------------------------------

@lru_cache(maxsize=32)
def spectral_matrices(N: int, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourier derivative D and zero-mean antiderivative D⁺ on N periodic nodes.

    The Nyquist mode (even N) is dropped from both, so D⁺D is the projector
    onto modes 1..⌈N/2⌉−1.
    """
    k = 2.0 * np.pi * np.fft.fftfreq(N, d=T / N)
    keep = k != 0.0
    if N % 2 == 0:
        keep[N // 2] = False
    mult_d = np.where(keep, 1j * k, 0.0)
    with np.errstate(divide="ignore"):
        mult_i = np.where(keep, 1.0 / np.where(keep, 1j * k, 1.0), 0.0)
    F = np.fft.fft(np.eye(N), axis=0)
    D = np.real(np.fft.ifft(mult_d[:, None] * F, axis=0))
    Dp = np.real(np.fft.ifft(mult_i[:, None] * F, axis=0))
    D.flags.writeable = False
    Dp.flags.writeable = False
    return D, Dp


class _Collocation:
    """Unknown vector x = [z (N), s0, s1 (even N only)].

    With ``unknowns="mixed"`` z is the slope where p ≥ 2 and the flux where
    p < 2, so both maps z ↦ d and z ↦ Φ have bounded derivatives. With
    ``unknowns="flux"`` z is the flux everywhere, which makes the principal
    part linear. s1 is the Nyquist amplitude
    of u. Free mode: s0 is the mean of u. Pinned mode: the mean is fixed and
    s0 is a constant multiplier added to the residual so the bordered system
    stays square; it is part of the reported residual.
    """

    def __init__(self, pf: ExponentField, ell: Rhs, pin: float | None, unknowns: str = "mixed"):
        g = pf.grid
        self.pf, self.ell, self.pin = pf, ell, pin
        self.N = N = g.N
        self.m = 2 if N % 2 == 0 else 1
        self.t = g.t[:-1]
        self.p = np.asarray(pf.p[:-1])
        self.slope_var = self.p >= 2.0 if unknowns == "mixed" else np.zeros(N, dtype=bool)
        self.D, self.Dp = spectral_matrices(N, g.T)
        self.alt = (-1.0) ** np.arange(N)
        self.h = g.dt

    def centred(self, v: np.ndarray) -> np.ndarray:
        return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * self.h)

    def z_from_slope(self, d: np.ndarray) -> np.ndarray:
        return np.where(self.slope_var, d, kernels.phi(self.p, np.ascontiguousarray(d)))

    def maps(self, z: np.ndarray):
        p, s = self.p, self.slope_var
        az = np.abs(z)
        pw = kernels.phi(p, np.ascontiguousarray(z))      # |z|^{p-2} z
        iw = kernels.phi_inv(p, np.ascontiguousarray(z))  # |z|^{1/(p-1)-1} z
        d = np.where(s, z, iw)
        Phi = np.where(s, pw, z)
        r2 = az * az + EPS_REG * EPS_REG
        dPhi = np.where(s, (p - 1.0) * r2 ** ((p - 2.0) / 2.0), 1.0)
        dd = np.where(s, 1.0, r2 ** ((2.0 - p) / (2.0 * (p - 1.0))) / (p - 1.0))
        return d, Phi, dd, dPhi

    def values(self, x: np.ndarray, d: np.ndarray) -> np.ndarray:
        N = self.N
        u = self.Dp @ d + (x[N] if self.pin is None else self.pin)
        if self.m == 2:
            u = u + x[N + 1] * self.alt
        return u

    def residual(self, x: np.ndarray, lam: float):
        N = self.N
        z = x[:N]
        d, Phi, dd, dPhi = self.maps(z)
        u = self.values(x, d)
        ell = self.ell(self.t, u, d)
        F = self.centred(Phi) - lam * ell
        if self.pin is not None:
            F = F + x[N]
        extra = [d.mean()]
        if self.m == 2:
            extra.append(np.dot(self.alt, d) / N)
        return np.concatenate([F, extra]), (d, Phi, dd, dPhi, u)

    def jacobian(self, x: np.ndarray, lam: float, cache) -> np.ndarray:
        N, m = self.N, self.m
        d, Phi, dd, dPhi, u = cache
        lx, ly = self.ell.partials(self.t, u, d)
        J = np.zeros((N + m, N + m))
        idx = np.arange(N)
        c = 1.0 / (2.0 * self.h)
        # centred difference of Φ(z)
        J[idx, (idx + 1) % N] += c * dPhi[(idx + 1) % N]
        J[idx, (idx - 1) % N] -= c * dPhi[(idx - 1) % N]
        # −λ(ℓx ∂u/∂z + ℓy ∂d/∂z)
        J[:N, :N] -= lam * (lx[:, None] * self.Dp) * dd[None, :]
        J[idx, idx] -= lam * ly * dd
        J[:N, N] = -lam * lx if self.pin is None else 1.0
        if m == 2:
            J[:N, N + 1] = -lam * lx * self.alt
        J[N, :N] = dd / N
        if m == 2:
            J[N + 1, :N] = self.alt * dd / N
        return J

    def sample(self, x: np.ndarray) -> PeriodicSample:
        d, *_ = self.maps(x[:self.N])
        u = self.values(x, d)
        return PeriodicSample(self.pf.grid, np.append(u, u[0]), np.append(d, d[0]))

    def initial(self, u: np.ndarray, d: np.ndarray) -> np.ndarray:
        """Unknowns from node values and slopes on the N periodic nodes."""
        N = self.N
        d = d - d.mean()
        if self.m == 2:
            d = d - self.alt * np.dot(self.alt, d) / N
        x = np.zeros(N + self.m)
        x[:N] = self.z_from_slope(d)
        if self.pin is None:
            x[N] = u.mean()
        if self.m == 2:
            x[N + 1] = np.dot(self.alt, u) / N
        return x


def _solve_linear(J: np.ndarray, F: np.ndarray) -> np.ndarray:
    try:
        dx = np.linalg.solve(J, F)
        if np.all(np.isfinite(dx)):
            return dx
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(J, F, rcond=None)[0]


@dataclass
class _NewtonOutcome:
    x: np.ndarray
    residual: float
    iters: int
    ok: bool


def _newton(col: _Collocation, x0: np.ndarray, lam: float, tol: float,
            max_iter: int, polish: bool = False) -> _NewtonOutcome:
    """Damped Newton; stops at ``tol``, or at the roundoff floor when ``polish`` is set."""
    try:
        F, cache = col.residual(x0, lam)
    except DomainError:
        return _NewtonOutcome(x0, math.inf, 0, False)
    x, r = x0, float(np.max(np.abs(F)))
    target = 0.0 if polish else tol
    it = 0
    while it < max_iter and r > target:
        it += 1
        try:
            J = col.jacobian(x, lam, cache)
        except DomainError:
            break
        dx = _solve_linear(J, F)
        step, accepted = 1.0, False
        for _ in range(21):
            xn = x - step * dx
            try:
                Fn, cn = col.residual(xn, lam)
                rn = float(np.max(np.abs(Fn)))
            except DomainError:
                rn = math.inf
            if math.isfinite(rn) and rn < r:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        stagnating = rn > 0.5 * r and r <= tol
        x, F, cache, r = xn, Fn, cn, rn
        if stagnating:
            break
    return _NewtonOutcome(x, r, it, r <= tol)


@dataclass(frozen=True)
class HomotopyOptions:
    tol: float = 1e-8
    lam0: float = 1e-3
    step_floor: float = 1e-6
    max_newton: int = 25
    fast_iters: int = 4
    pin_mean: float | None = None
    a_star: float | None = None
    degree_interval: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class HomotopyState:
    lam: float
    iterate: PeriodicSample
    step: float
    corrector_tol: float
    corrector_iters: int = 0
    residual: float = 0.0


def _degree_gate(ell: Rhs, grid: Grid, R_bound: float, opts: HomotopyOptions) -> float:
    L = AveragedMap(ell, grid)
    interval = opts.degree_interval
    if interval is None:
        if ell.guard[0] < -R_bound and ell.guard[1] > R_bound:
            interval = (-R_bound, R_bound)
        else:
            interval = _scan_interval(ell, (-R_bound, R_bound))
    roots = averaged_roots(ell, grid, interval)
    deg = brouwer_degree(L, interval)
    if deg.degree == 0:
        raise DegreeZero(f"averaged map has degree 0 on {interval}")
    if opts.a_star is not None:
        return opts.a_star
    return roots[0]


def _predict_initial(pf: ExponentField, ell: Rhs, a: float, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """a + K(λN(a)) on the periodic nodes, or the constant a if that fails."""
    N = pf.grid.N
    try:
        g = G_map(pf, ell, pf.grid.constant(a), lam)
        return a + g.values[:-1] - g.values[0], g.deriv[:-1].copy()
    except (DomainError, ArithmeticError, ValueError):
        return np.full(N, a), np.zeros(N)


def homotopy_solve(pf: ExponentField, ell: Rhs, R_bound: float,
                   opts: HomotopyOptions | None = None) -> tuple[PeriodicSample, list[HomotopyState]]:
    """Follow (φ(u'))' = λℓ from λ₀ to λ = 1.

    Without ``opts.pin_mean`` the start is gated on a nonzero degree of the
    averaged map and begins at its root. With ``pin_mean`` the mean of u is
    held fixed and no degree gate is applied.

    Each step tries the flux and the slope parametrization of the corrector,
    starting with whichever succeeded last, from a secant predictor and then
    from the previous point.
    """
    opts = opts or HomotopyOptions()
    grid = pf.grid
    pin = opts.pin_mean
    cols = [_Collocation(pf, ell, pin, unknowns="flux"), _Collocation(pf, ell, pin, unknowns="mixed")]
    a = pin if pin is not None else _degree_gate(ell, grid, R_bound, opts)
    N = grid.N

    lam_prev, prev = 0.0, None
    lam_cur = 0.0
    cur = (np.full(N, a), np.zeros(N))
    step = opts.lam0
    trace: list[HomotopyState] = []
    while lam_cur < 1.0:
        lam_try = min(1.0, lam_cur + step)
        guesses = []
        if prev is not None:
            w = (lam_try - lam_cur) / (lam_cur - lam_prev)
            guesses.append(tuple(c + (c - q) * w for c, q in zip(cur, prev)))
        elif not trace:
            guesses.append(_predict_initial(pf, ell, a, lam_try))
        guesses.append(cur)
        out, used = None, None
        for guess in guesses:
            for col in cols:
                res = _newton(col, col.initial(*guess), lam_try, opts.tol, opts.max_newton,
                              polish=lam_try == 1.0)
                if res.ok:
                    out, used = res, col
                    break
            if out is not None:
                break
        if out is None:
            step *= 0.5
            if step < opts.step_floor:
                raise StepCollapse(f"λ step fell below {opts.step_floor:g} at λ = {lam_cur:.6g}")
            continue
        if used is not cols[0]:
            cols.reverse()
        u = used.sample(out.x)
        if lam_try == 1.0:
            # the other parametrization may reach a lower roundoff floor
            other = cols[1]
            alt = _newton(other, other.initial(u.values[:-1], u.deriv[:-1]), 1.0, opts.tol,
                          opts.max_newton, polish=True)
            if alt.ok and alt.residual < out.residual:
                out, used = alt, other
                u = other.sample(alt.x)
        size = float(np.max(np.abs(u.values)) + np.max(np.abs(u.deriv)))
        if size > R_bound:
            raise BoundaryHit(f"‖u‖∞ + ‖u'‖∞ = {size:.6g} exceeds {R_bound:.6g} at λ = {lam_try:.6g}")
        lam_prev, prev = lam_cur, cur
        lam_cur, cur = lam_try, (u.values[:-1].copy(), u.deriv[:-1].copy())
        trace.append(HomotopyState(lam_cur, u, step, opts.tol, out.iters, out.residual))
        if out.iters <= opts.fast_iters:
            step *= 2.0
    u = trace[-1].iterate
    # certify against the interior-node residual that the rest of the package uses
    cert = bvp_residual(pf, ell, u)
    if pin is not None:
        cert = max(cert, trace[-1].residual)
    if cert > opts.tol:
        raise StepCollapse(f"final residual {cert:.3e} above tolerance {opts.tol:.1e}")
    trace[-1] = replace(trace[-1], residual=cert)
    return u, trace


def write_trace_csv(trace: Sequence[HomotopyState], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "corrector_iters", "residual"])
        for s in trace:
            w.writerow([f"{s.lam:.16e}", s.corrector_iters, f"{s.residual:.16e}"])


# -- ε-family ------------------------------------------------------------------

def eps_rhs(theta, e: PeriodicSample, eps: float) -> Rhs:
    """ℓ(t, x, y) = e(t) + εx − θ(x)y with e interpolated periodically."""
    from .operator import sampled_forcing
    ef = sampled_forcing(e)

    def fn(t, x, y):
        return ef(t) + eps * x - np.asarray(theta(x), float) * y
    return Rhs(fn, name=f"eps_family(eps={eps:g})")


def solve_eps_problem(pf: ExponentField, theta, e: PeriodicSample, eps: float,
                      tol: float = 1e-8, R_bound: float | None = None) -> tuple[PeriodicSample, list[HomotopyState]]:
    """Periodic solution of (φ(u'))' + θ(u)u' − εu = e with zero-mean e.

    Every solution has zero mean, so the mean is pinned to 0 and a constant
    multiplier closes the system; the multiplier is the discrete defect of
    ∫θ(u)u' = 0 and is included in the certified residual. For ε > 0 the
    averaged map εa is still required to have degree 1 on (−R, R).
    """
    ebar = integrate(e) / e.grid.T
    if abs(ebar) > 1e-12:
        raise ValueError(f"forcing must have zero mean, got {ebar:.3e}")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    ell = eps_rhs(theta, e, eps)
    if R_bound is None:
        from .bounds import compute_R1, compute_chain
        from .periodic import norms
        eL1 = norms(e).L1
        R1 = compute_R1(e.grid.T, pf.p_minus, eL1)
        chain = compute_chain(R1, e.grid.T, pf.p_minus, eL1, theta, max(eps, 1e-12))
        R_bound = 2.0 * chain.R + 10.0
    if eps > 0:
        deg = brouwer_degree(AveragedMap(ell, pf.grid), R_bound)
        if deg.degree == 0:
            raise DegreeZero(f"averaged map has degree 0 on (−{R_bound}, {R_bound})")
    return homotopy_solve(pf, ell, R_bound, HomotopyOptions(tol=tol, pin_mean=0.0))
