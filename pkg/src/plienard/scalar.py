"""Bracketing and bisection for scalar equations."""

from __future__ import annotations

import math
from collections.abc import Callable

from .errors import BracketFailure


def bisect(fn: Callable[[float], float], lo: float, hi: float, *,
           flo: float | None = None, fhi: float | None = None,
           rtol: float = 1e-15, max_iter: int = 400) -> float:
    """Root of ``fn`` in [lo, hi] given a sign change; returns the endpoint with smaller |fn|.

    Iterates until the bracket is ``rtol`` relative wide or stops shrinking
    in floating point.
    """
    flo = fn(lo) if flo is None else flo
    fhi = fn(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= rtol * max(abs(lo), abs(hi), 1e-300):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


def positive_root_increasing(fn: Callable[[float], float], start: float = 1.0,
                             limit: float = 1e300) -> float:
    """Root on (0, inf) of a function negative at 0+ and eventually positive.

    Doubles ``start`` until ``fn`` turns positive, then bisects.
    """
    hi = start
    fhi = fn(hi)
    lo = 0.0
    while fhi <= 0.0:
        if fhi == 0.0:
            return hi
        lo = hi
        hi *= 2.0
        if hi > limit or not math.isfinite(hi):
            raise BracketFailure("no sign change before overflow")
        fhi = fn(hi)
    if lo == 0.0:
        # shrink towards 0 so bisection starts from a genuine negative value
        while True:
            cand = hi / 2.0
            fc = fn(cand)
            if fc < 0.0 or cand < 1e-300:
                lo = cand
                break
            if fc == 0.0:
                return cand
            hi, fhi = cand, fc
    return bisect(fn, lo, hi, fhi=fhi)
