"""Periodic grids, samples, trapezoid quadrature and the p(t)-Laplacian maps."""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import InconsistentChannels, PeriodicityError

__all__ = [
    "Grid", "PeriodicSample", "ExponentField", "Norms",
    "closure_tol", "integrate", "cumint", "decompose", "mean",
    "norms", "sobolev_margin", "phi", "phi_inv",
]

PERIODIC_P_TOL = 1e-12


def closure_tol(values) -> float:
    """Periodic closure tolerance 1e-9 * (1 + sup|v|)."""
    return 1e-9 * (1.0 + float(np.max(np.abs(values))))


@dataclass(frozen=True)
class Grid:
    """Closed uniform grid t_i = i T / N, i = 0..N, with t_N identified with t_0."""

    T: float
    N: int

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"period must be positive and finite, got {self.T}")
        if int(self.N) != self.N or self.N < 16:
            raise ValueError(f"node count must be an integer >= 16, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def dt(self) -> float:
        return self.T / self.N

    @cached_property
    def t(self) -> np.ndarray:
        t = np.arange(self.N + 1) * self.dt
        t[-1] = self.T
        t.flags.writeable = False
        return t

    def sample(self, fn: Callable[[np.ndarray], np.ndarray], derivative: Callable | None = None) -> "PeriodicSample":
        """Sample a T-periodic function (and optionally its derivative) on the nodes."""
        values = np.broadcast_to(np.asarray(fn(self.t), dtype=float), self.t.shape).copy()
        d = None
        if derivative is not None:
            d = np.broadcast_to(np.asarray(derivative(self.t), dtype=float), self.t.shape).copy()
        return PeriodicSample(self, values, d)

    def constant(self, c: float, with_derivative: bool = True) -> "PeriodicSample":
        return PeriodicSample(self, np.full(self.N + 1, float(c)),
                              np.zeros(self.N + 1) if with_derivative else None)


@dataclass(frozen=True, eq=False)
class PeriodicSample:
    """Values (and optionally derivatives) of a T-periodic function on a closed grid."""

    grid: Grid
    values: np.ndarray
    deriv: np.ndarray | None = None

    def __post_init__(self):
        n = self.grid.N + 1
        v = np.array(self.values, dtype=float)
        if v.shape != (n,):
            raise ValueError(f"expected {n} node values, got shape {v.shape}")
        if abs(v[0] - v[-1]) > closure_tol(v):
            raise PeriodicityError(f"value closure violated: |u_0 - u_N| = {abs(v[0] - v[-1]):.3e}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.deriv is not None:
            d = np.array(self.deriv, dtype=float)
            if d.shape != (n,):
                raise ValueError(f"expected {n} derivative values, got shape {d.shape}")
            if abs(d[0] - d[-1]) > closure_tol(d):
                raise PeriodicityError(f"derivative closure violated: |d_0 - d_N| = {abs(d[0] - d[-1]):.3e}")
            d.flags.writeable = False
            object.__setattr__(self, "deriv", d)

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def has_deriv(self) -> bool:
        return self.deriv is not None

    def periodic_values(self) -> np.ndarray:
        """The N distinct node values (t_N dropped)."""
        return self.values[:-1]

    def __add__(self, c: float) -> "PeriodicSample":
        return PeriodicSample(self.grid, self.values + c, self.deriv)

    def scaled(self, c: float) -> "PeriodicSample":
        return PeriodicSample(self.grid, c * self.values, None if self.deriv is None else c * self.deriv)


@dataclass(frozen=True, eq=False)
class ExponentField:
    """Variable exponent p(t) sampled on the grid nodes."""

    grid: Grid
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (self.grid.N + 1,):
            raise ValueError(f"expected {self.grid.N + 1} exponent samples, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("exponent field has non-finite samples")
        if p.min() <= 1.0:
            raise ValueError(f"exponent must exceed 1 everywhere, min is {p.min()}")
        if abs(p[0] - p[-1]) > PERIODIC_P_TOL:
            raise PeriodicityError(f"exponent closure p(0) = p(T) violated by {abs(p[0] - p[-1]):.3e}")
        jump = np.max(np.abs(np.diff(p)) / p[:-1])
        if jump > 0.10:
            warnings.warn(f"exponent varies by {jump:.1%} between adjacent nodes; refine the grid",
                          RuntimeWarning, stacklevel=3)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @classmethod
    def constant(cls, grid: Grid, p: float) -> "ExponentField":
        return cls(grid, np.full(grid.N + 1, float(p)))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "ExponentField":
        return cls(grid, np.broadcast_to(np.asarray(fn(grid.t), dtype=float), grid.t.shape).copy())

    @property
    def p_minus(self) -> float:
        return float(self.p.min())

    @property
    def p_plus(self) -> float:
        return float(self.p.max())

    def phi(self, t_index, x):
        return phi(self, t_index, x)

    def phi_inv(self, t_index, y):
        return phi_inv(self, t_index, y)


# -- quadrature ------------------------------------------------------------

def _vals(v) -> np.ndarray:
    return v.values if isinstance(v, PeriodicSample) else np.asarray(v, dtype=float)


def integrate(v: PeriodicSample) -> float:
    """Composite trapezoid rule over [0, T]."""
    x = v.values
    return float(v.grid.dt * (x.sum() - 0.5 * (x[0] + x[-1])))


def cumint(v: PeriodicSample) -> PeriodicSample:
    """Running trapezoid integral from t_0; the result need not close periodically,
    so it is returned as a plain array wrapped only when it does."""
    c = kernels.cumtrapz(np.ascontiguousarray(v.values), v.grid.dt)
    return _maybe_sample(v.grid, c)


def _maybe_sample(grid: Grid, c: np.ndarray):
    try:
        return PeriodicSample(grid, c)
    except PeriodicityError:
        return OpenSample(grid, c)


@dataclass(frozen=True, eq=False)
class OpenSample:
    """Node values on [0, T] without periodic closure (e.g. a running integral)."""

    grid: Grid
    values: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.grid.t


def mean(v: PeriodicSample) -> float:
    return integrate(v) / v.grid.T


def decompose(v: PeriodicSample) -> tuple[float, PeriodicSample]:
    """Split v into its period mean and zero-mean remainder."""
    m = mean(v)
    return m, PeriodicSample(v.grid, v.values - m)


# -- norms -----------------------------------------------------------------

@dataclass(frozen=True)
class Norms:
    sup: float
    L1: float
    Lr: float
    r: float
    W1p: float | None


def _trap(grid: Grid, x: np.ndarray) -> float:
    return float(grid.dt * (x.sum() - 0.5 * (x[0] + x[-1])))


def norms(v: PeriodicSample, r: float = 2.0, p_minus: float | None = None) -> Norms:
    """Sup, L1, L^r and (if the derivative channel and ``p_minus`` are given) W^{1,p_-} norms."""
    a = np.abs(v.values)
    g = v.grid
    lr = _trap(g, a ** r) ** (1.0 / r)
    w1p = None
    if p_minus is not None and v.deriv is not None:
        w1p = (_trap(g, a ** p_minus) + _trap(g, np.abs(v.deriv) ** p_minus)) ** (1.0 / p_minus)
    return Norms(float(a.max()), _trap(g, a), lr, r, w1p)


def check_channels(v: PeriodicSample, rtol: float = 0.1) -> None:
    """Raise InconsistentChannels unless the centred difference of the values
    matches the derivative channel to ``rtol * (1 + sup|d|)``."""
    if v.deriv is None:
        raise InconsistentChannels("derivative channel missing")
    u = v.values[:-1]
    fd = (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * v.grid.dt)
    err = np.max(np.abs(fd - v.deriv[:-1]))
    if err > rtol * (1.0 + np.max(np.abs(v.deriv))):
        raise InconsistentChannels(f"derivative channel off by {err:.3e} from centred differences")


def sobolev_margin(v: PeriodicSample, rtol: float = 0.1) -> float:
    """‖v'‖_{L¹} − ‖ṽ‖_∞, non-negative for every periodic absolutely continuous v."""
    check_channels(v, rtol)
    _, tilde = decompose(v)
    return _trap(v.grid, np.abs(v.deriv)) - float(np.max(np.abs(tilde.values)))


# -- p(t)-Laplacian maps -----------------------------------------------------

def phi(pf: ExponentField, t_index, x):
    """φ_{p(t)}(x) = |x|^{p(t)-2} x at node(s) ``t_index``; φ(0) = 0."""
    return kernels.phi(pf.p[t_index], x)


def phi_inv(pf: ExponentField, t_index, y):
    """Pointwise inverse |y|^{1/(p-1) - 1} y of φ_{p(t)}."""
    return kernels.phi_inv(pf.p[t_index], y)
