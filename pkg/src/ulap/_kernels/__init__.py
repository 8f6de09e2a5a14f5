"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy reference
module is the fallback.  ``ULAP_BACKEND=python`` or ``ULAP_BACKEND=compiled``
forces the choice (the latter raises if the extension is missing).  Both
backends expose the same functions; see ``_pyref`` for the contract.
"""

import os

_requested = os.environ.get("ULAP_BACKEND", "").strip().lower()
if _requested not in ("", "auto", "compiled", "python"):
    raise ImportError(f"ULAP_BACKEND must be 'compiled' or 'python', got {_requested!r}")

if _requested == "python":
    from . import _pyref as _impl
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pyref as _impl

BACKEND = _impl.NAME

tridiag_reduce = _impl.tridiag_reduce
apply_reflectors = _impl.apply_reflectors
accumulate_q = _impl.accumulate_q
eigvals_tridiag = _impl.eigvals_tridiag
eigvecs_tridiag = _impl.eigvecs_tridiag
eigh_tridiag_full = _impl.eigh_tridiag_full
cholesky_lower = _impl.cholesky_lower
solve_lower = _impl.solve_lower
solve_lower_ct = _impl.solve_lower_ct

__all__ = [
    "BACKEND",
    "tridiag_reduce",
    "apply_reflectors",
    "accumulate_q",
    "eigvals_tridiag",
    "eigvecs_tridiag",
    "eigh_tridiag_full",
    "cholesky_lower",
    "solve_lower",
    "solve_lower_ct",
]
