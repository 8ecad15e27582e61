# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and semantics as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


cdef inline double _phi(double p, double x) nogil:
    if x > 0.0:
        return pow(x, p - 1.0)
    elif x < 0.0:
        return -pow(-x, p - 1.0)
    return 0.0


cdef inline double _phi_inv(double p, double y) nogil:
    if y > 0.0:
        return pow(y, 1.0 / (p - 1.0))
    elif y < 0.0:
        return -pow(-y, 1.0 / (p - 1.0))
    return 0.0


def phi(p, x):
    cdef cnp.ndarray[double, ndim=1] pa, xa, out
    pb, xb = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(x, dtype=float))
    shape = xb.shape
    pa = np.ascontiguousarray(pb.ravel())
    xa = np.ascontiguousarray(xb.ravel())
    out = np.empty(xa.shape[0])
    cdef Py_ssize_t i, n = xa.shape[0]
    for i in range(n):
        out[i] = _phi(pa[i], xa[i])
    return out.reshape(shape) if shape else out[0]


def phi_inv(p, y):
    cdef cnp.ndarray[double, ndim=1] pa, ya, out
    pb, yb = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(y, dtype=float))
    shape = yb.shape
    pa = np.ascontiguousarray(pb.ravel())
    ya = np.ascontiguousarray(yb.ravel())
    out = np.empty(ya.shape[0])
    cdef Py_ssize_t i, n = ya.shape[0]
    for i in range(n):
        out[i] = _phi_inv(pa[i], ya[i])
    return out.reshape(shape) if shape else out[0]


def flux_mismatch(const double[::1] p, const double[::1] W, double a, double dt):
    cdef Py_ssize_t i, n = W.shape[0]
    cdef double s = 0.0
    with nogil:
        for i in range(n):
            s += _phi_inv(p[i], a + W[i])
        s -= 0.5 * (_phi_inv(p[0], a + W[0]) + _phi_inv(p[n - 1], a + W[n - 1]))
    return dt * s


def cumtrapz(const double[::1] v, double dt):
    cdef Py_ssize_t i, n = v.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double acc = 0.0
    o[0] = 0.0
    with nogil:
        for i in range(1, n):
            acc += 0.5 * dt * (v[i] + v[i - 1])
            o[i] = acc
    return out


cdef int _thomas(const double[::1] a, double[::1] b, const double[::1] c, const double[::1] r,
                 double[::1] cp, double[::1] dp, double[::1] x) nogil:
    cdef Py_ssize_t i, n = b.shape[0]
    cdef double piv = b[0]
    if piv == 0.0:
        return -1
    cp[0] = c[0] / piv
    dp[0] = r[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        if piv == 0.0:
            return -1
        cp[i] = c[i] / piv
        dp[i] = (r[i] - a[i] * dp[i - 1]) / piv
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return 0


def cyclic_tridiag_solve(lower, diag, upper, rhs):
    cdef const double[::1] a = np.ascontiguousarray(lower, dtype=float)
    cdef double[::1] b = np.array(diag, dtype=float)
    cdef const double[::1] c = np.ascontiguousarray(upper, dtype=float)
    cdef const double[::1] r = np.ascontiguousarray(rhs, dtype=float)
    cdef Py_ssize_t i, n = b.shape[0]
    cdef double alpha = c[n - 1]
    cdef double beta = a[0]
    cdef double gamma = -b[0] if b[0] != 0.0 else -1.0
    b[0] = b[0] - gamma
    b[n - 1] = b[n - 1] - alpha * beta / gamma
    cp_arr = np.empty(n)
    dp_arr = np.empty(n)
    x_arr = np.empty(n)
    z_arr = np.empty(n)
    u_arr = np.zeros(n)
    cdef double[::1] cp = cp_arr
    cdef double[::1] dp = dp_arr
    cdef double[::1] x = x_arr
    cdef double[::1] z = z_arr
    cdef double[::1] u = u_arr
    u[0] = gamma
    u[n - 1] = alpha
    cdef int status
    with nogil:
        status = _thomas(a, b, c, r, cp, dp, x)
        if status == 0:
            status = _thomas(a, b, c, u, cp, dp, z)
    if status != 0:
        raise ZeroDivisionError("zero pivot")
    cdef double denom = 1.0 + z[0] + beta * z[n - 1] / gamma
    if denom == 0.0:
        raise ZeroDivisionError("singular cyclic system")
    cdef double fact = (x[0] + beta * x[n - 1] / gamma) / denom
    for i in range(n):
        x[i] = x[i] - fact * z[i]
    return x_arr
