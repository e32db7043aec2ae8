"""Optional numba acceleration.

Hot kernels are written twice: an ``@njit`` loop and a vectorised numpy
version. ``NORMBOUND_DISABLE_NUMBA=1`` (or a missing numba install) selects
the numpy versions everywhere.
"""
import os

_flag = os.environ.get("NORMBOUND_DISABLE_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise.

    The decorated function is compiled lazily, so defining kernels costs
    nothing when the numpy path is selected.
    """
    options = dict(cache=True, nogil=True)
    options.update(kwargs)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    if args and callable(args[0]):
        return numba.njit(**options)(args[0])
    return numba.njit(*args, **options)


def backend():
    return "numba" if USE_NUMBA else "numpy"
