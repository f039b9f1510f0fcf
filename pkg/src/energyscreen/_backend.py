"""Selection between numba-compiled kernels and the pure-numpy fallback.

The backend is chosen once at import from the ``ENERGYSCREEN_NO_NUMBA``
environment variable (any non-empty value other than ``0`` disables numba)
and can be switched at runtime with :func:`set_backend`, which is what the
benchmark and the backend-agreement tests use.
"""

import os
import warnings

try:
    import numba

    HAVE_NUMBA = True
    # probe TBB last: old system TBB builds only produce a warning
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

ENV_FLAG = "ENERGYSCREEN_NO_NUMBA"


def _env_disabled():
    value = os.environ.get(ENV_FLAG, "").strip().lower()
    return value not in ("", "0", "false", "no")


_use_numba = HAVE_NUMBA and not _env_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise.

    Kernels decorated here keep their plain-Python body reachable through
    ``.py_func`` so the numpy path never needs compilation.
    """
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def deco(func):
        func.py_func = func
        return func

    if len(args) == 1 and callable(args[0]) and not kwargs.get("signature"):
        return deco(args[0])
    return deco


# numba only recognises its own prange object inside compiled code
prange = numba.prange if HAVE_NUMBA else range


def use_numba():
    """Return True when compiled kernels are active."""
    return _use_numba


def backend_name():
    return "numba" if _use_numba else "numpy"


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend name."""
    global _use_numba
    previous = backend_name()
    if name == "numba":
        if not HAVE_NUMBA:
            warnings.warn("numba is not installed; staying on the numpy backend")
            return previous
        _use_numba = True
    elif name == "numpy":
        _use_numba = False
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    return previous
