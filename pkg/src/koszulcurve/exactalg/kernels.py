"""Selects the elimination backend at import time.

The compiled extension is used when it was built; otherwise (or when
``KOSZULCURVE_PURE_PYTHON=1`` is set) the pure-Python fallback is used.
Both modules stay importable so benchmarks can compare them.
"""

import os

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("KOSZULCURVE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

MAX_MODULUS = 2**31


def rank_modp(A, p):
    if p >= MAX_MODULUS:
        return python_backend.rank_modp(A, p)
    return _impl.rank_modp(A, p)


def rref_modp(A, p):
    if p >= MAX_MODULUS:
        return python_backend.rref_modp(A, p)
    return _impl.rref_modp(A, p)
