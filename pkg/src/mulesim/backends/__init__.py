"""Kernel backend selection.

The placement and assignment inner loops exist twice: as numba-jitted
loop kernels (:mod:`mulesim.backends.numba_kernels`) and as a vectorized
pure-numpy fallback (:mod:`mulesim.backends.numpy_kernels`). The active
backend is chosen once at import time from the ``MULESIM_BACKEND``
environment variable:

    MULESIM_BACKEND=auto    use numba if importable, else numpy (default)
    MULESIM_BACKEND=numba   require numba, fail loudly if missing
    MULESIM_BACKEND=numpy   force the pure-numpy path

Both backends implement the same function set with the same tie-breaking
semantics (squared-distance comparisons, lowest index wins, accumulation
in input order), so simulation results are deterministic for a fixed
backend. ``benchmarks/bench_kernels.py`` compares their throughput.
"""

import os

__all__ = ["kernels", "backend_name", "available_backends"]


def _select():
    choice = os.environ.get("MULESIM_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise RuntimeError(
            f"MULESIM_BACKEND must be 'auto', 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        from . import numpy_kernels
        return numpy_kernels, "numpy"
    try:
        from . import numba_kernels
        return numba_kernels, "numba"
    except ImportError:
        if choice == "numba":
            raise
        from . import numpy_kernels
        return numpy_kernels, "numpy"


kernels, backend_name = _select()


def available_backends():
    """Names of the backends importable in this environment."""
    names = ["numpy"]
    try:
        from . import numba_kernels  # noqa: F401
        names.insert(0, "numba")
    except ImportError:
        pass
    return names
