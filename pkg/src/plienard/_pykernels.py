"""Pure Python / numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``PLIENARD_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

import numpy as np


def phi(p, x):
    """|x|^(p-2) x, written as sign(x)|x|^(p-1) so 0 never meets a negative power."""
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** (p - 1.0)


def phi_inv(p, y):
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.abs(y) ** (1.0 / (p - 1.0))


def flux_mismatch(p, W, a, dt):
    """Trapezoid integral over a closed grid of phi_inv(p_i, a + W_i)."""
    f = phi_inv(p, a + np.asarray(W, dtype=float))
    return float(dt * (f.sum() - 0.5 * (f[0] + f[-1])))


def cumtrapz(v, dt):
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[0] = 0.0
    np.cumsum(0.5 * dt * (v[1:] + v[:-1]), out=out[1:])
    return out


def _thomas(a, b, c, r):
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n
    piv = b[0]
    if piv == 0.0:
        raise ZeroDivisionError("zero pivot")
    cp[0] = c[0] / piv
    dp[0] = r[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        if piv == 0.0:
            raise ZeroDivisionError("zero pivot")
        cp[i] = c[i] / piv
        dp[i] = (r[i] - a[i] * dp[i - 1]) / piv
    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def cyclic_tridiag_solve(lower, diag, upper, rhs):
    """Solve lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i], indices mod n.

    Sherman-Morrison correction of a plain Thomas solve. Raises
    ``ZeroDivisionError`` on a zero pivot.
    """
    a = [float(v) for v in lower]
    b = [float(v) for v in diag]
    c = [float(v) for v in upper]
    r = [float(v) for v in rhs]
    n = len(b)
    alpha = c[n - 1]  # A[n-1, 0]
    beta = a[0]       # A[0, n-1]
    gamma = -b[0] if b[0] != 0.0 else -1.0
    bb = list(b)
    bb[0] = b[0] - gamma
    bb[n - 1] = b[n - 1] - alpha * beta / gamma
    x = _thomas(a, bb, c, r)
    u = [0.0] * n
    u[0] = gamma
    u[n - 1] = alpha
    z = _thomas(a, bb, c, u)
    denom = 1.0 + z[0] + beta * z[n - 1] / gamma
    if denom == 0.0:
        raise ZeroDivisionError("singular cyclic system")
    fact = (x[0] + beta * x[n - 1] / gamma) / denom
    return np.array([xi - fact * zi for xi, zi in zip(x, z)])
