"""Optional numba acceleration.

Set ``PARETOFLOW_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The
backend can also be switched at runtime with :func:`set_backend`, which is
what the benchmark script and the kernel equivalence tests do.
"""

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

ENV_FLAG = "PARETOFLOW_DISABLE_NUMBA"

_disabled = os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")
_backend = "numba" if (HAVE_NUMBA and not _disabled) else "numpy"


def optional_njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""

    def decorator(func):
        if HAVE_NUMBA:
            return njit(*args, **kwargs)(func)
        return func

    return decorator


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"`` kernels; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous
