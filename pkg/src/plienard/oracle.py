"""Finite-difference Newton oracle for (φ_{p(t)}(u'))' = ℓ(t, u, u').

A compact conservative flux scheme on the N periodic nodes, independent of
the continuation solver: one-sided slopes at half nodes with midpoint
exponents, a centred slope inside ℓ, and a cyclic tridiagonal Newton step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, MaxIter, SingularJacobian
from .operator import Rhs
from .periodic import ExponentField, Grid, PeriodicSample

__all__ = ["FdSystem", "Tridiagonal", "NewtonOptions", "fd_residual", "fd_jacobian",
           "newton_solve", "EPS_REG"]

EPS_REG = 1e-10


@dataclass(frozen=True, eq=False)
class FdSystem:
    grid: Grid
    p_half: np.ndarray  # p_{i+1/2}, i = 0..N-1
    t: np.ndarray       # the N periodic nodes
    eps_reg: float = EPS_REG

    @classmethod
    def from_field(cls, pf: ExponentField, eps_reg: float = EPS_REG) -> "FdSystem":
        p = pf.p
        return cls(pf.grid, np.ascontiguousarray(0.5 * (p[:-1] + p[1:])), pf.grid.t[:-1].copy(), eps_reg)

    @property
    def N(self) -> int:
        return self.grid.N

    def slopes(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Forward half-node slopes s_i = (u_{i+1} − u_i)/Δ and centred node slopes."""
        h = self.grid.dt
        up, um = np.roll(u, -1), np.roll(u, 1)
        return (up - u) / h, (up - um) / (2.0 * h)


@dataclass(frozen=True)
class Tridiagonal:
    """Cyclic tridiagonal matrix: row i has lower[i] at column i−1, upper[i] at i+1 (mod N)."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def dense(self) -> np.ndarray:
        n = self.diag.size
        J = np.diag(self.diag).astype(float)
        i = np.arange(n)
        J[i, (i - 1) % n] += self.lower
        J[i, (i + 1) % n] += self.upper
        return J

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.lower * np.roll(v, 1) + self.diag * v + self.upper * np.roll(v, -1)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        try:
            x = kernels.cyclic_tridiag_solve(np.ascontiguousarray(self.lower), np.ascontiguousarray(self.diag),
                                             np.ascontiguousarray(self.upper), np.ascontiguousarray(rhs))
        except ZeroDivisionError as exc:
            raise SingularJacobian(str(exc)) from exc
        x = np.asarray(x)
        if not np.all(np.isfinite(x)):
            raise SingularJacobian("non-finite Newton step")
        return x


def fd_residual(sys: FdSystem, u: np.ndarray, ell: Rhs, shift: float = 0.0) -> np.ndarray:
    """F_i at node values ``shift + u``."""
    u = np.asarray(u, dtype=float)
    h = sys.grid.dt
    s, c = sys.slopes(u)
    flux = kernels.phi(sys.p_half, np.ascontiguousarray(s))
    return (flux - np.roll(flux, 1)) / h - ell(sys.t, shift + u, c)


def _dphi(p: np.ndarray, s: np.ndarray, eps: float) -> np.ndarray:
    return (p - 1.0) * (s * s + eps * eps) ** ((p - 2.0) / 2.0)


def fd_jacobian(sys: FdSystem, u: np.ndarray, ell: Rhs, shift: float = 0.0) -> Tridiagonal:
    u = np.asarray(u, dtype=float)
    h = sys.grid.dt
    s, c = sys.slopes(u)
    w = _dphi(sys.p_half, s, sys.eps_reg) / (h * h)  # flux derivative at i+1/2
    wm = np.roll(w, 1)                                # at i−1/2
    lx, ly = ell.partials(sys.t, shift + u, c)
    lower = wm + ly / (2.0 * h)
    upper = w - ly / (2.0 * h)
    diag = -w - wm - lx
    return Tridiagonal(lower, diag, upper)


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 60
    max_halvings: int = 20
    dense_below: int = 64


@dataclass(frozen=True, eq=False)
class NewtonResult:
    u: PeriodicSample
    residual: float
    iterations: int


def _to_sample(sys: FdSystem, c: float, w: np.ndarray) -> PeriodicSample:
    u = c + w
    _, cs = sys.slopes(w)
    return PeriodicSample(sys.grid, np.append(u, u[0]), np.append(cs, cs[0]))


def newton_solve(sys: FdSystem, ell: Rhs, init, opts: NewtonOptions | None = None) -> NewtonResult:
    """Damped Newton from ``init`` (array of N or N+1 node values, a sample, or a constant).

    Iterates on w = u − c with c the initial mean, so slopes are formed from
    small numbers and the residual floor sits well below ``opts.tol``. Steps
    are halved until ‖F‖₂ decreases.
    """
    opts = opts or NewtonOptions()
    N = sys.N
    if isinstance(init, PeriodicSample):
        u0 = init.values[:-1].copy()
    else:
        u0 = np.broadcast_to(np.asarray(init, dtype=float), (N,) if np.ndim(init) == 0 else np.shape(init)).copy()
        if u0.size == N + 1:
            u0 = u0[:-1]
    c = float(np.mean(u0))
    w = u0 - c
    F = fd_residual(sys, w, ell, shift=c)
    r, m = float(np.max(np.abs(F))), float(np.dot(F, F))
    it = 0
    while r > opts.tol:
        if it >= opts.max_iter:
            raise MaxIter(f"oracle Newton stopped at residual {r:.3e} after {it} iterations")
        it += 1
        J = fd_jacobian(sys, w, ell, shift=c)
        if N <= opts.dense_below:
            try:
                dw = np.linalg.solve(J.dense(), F)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobian(str(exc)) from exc
        else:
            dw = J.solve(F)
        step = 1.0
        for _ in range(opts.max_halvings + 1):
            wn = w - step * dw
            try:
                Fn = fd_residual(sys, wn, ell, shift=c)
                mn = float(np.dot(Fn, Fn))
            except DomainError:
                mn = np.inf
            if mn < m:
                break
            step *= 0.5
        else:
            raise MaxIter(f"oracle line search failed at residual {r:.3e}")
        w, F, m = wn, Fn, mn
        r = float(np.max(np.abs(F)))
    return NewtonResult(_to_sample(sys, c, w), r, it)
