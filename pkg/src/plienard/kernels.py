"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when the environment variable ``PLIENARD_PURE_PYTHON`` is set to a truthy
value, the numpy fallback ``_pykernels`` is used. ``BACKEND`` names the
active choice.
"""

from __future__ import annotations

import os

from . import _pykernels

_force_python = os.environ.get("PLIENARD_PURE_PYTHON", "").strip().lower() not in ("", "0", "false", "no")

compiled = None
if not _force_python:
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else _pykernels
BACKEND = "cython" if compiled is not None else "python"

phi = _impl.phi
phi_inv = _impl.phi_inv
flux_mismatch = _impl.flux_mismatch
cumtrapz = _impl.cumtrapz
cyclic_tridiag_solve = _impl.cyclic_tridiag_solve


def backends() -> dict[str, object]:
    """All importable backends, keyed by name (for tests and benchmarks)."""
    out: dict[str, object] = {"python": _pykernels}
    if compiled is not None:
        out["cython"] = compiled
    else:
        try:
            from . import _ckernels
            out["cython"] = _ckernels
        except ImportError:
            pass
    return out
