"""Switch between numba-compiled kernels and the pure numpy fallback.

Set RWSUM_DISABLE_NUMBA=1 in the environment before import to force the
numpy path.  ``use_numba()`` can also be toggled at runtime (tests and the
benchmark do this).
"""
import functools
import os

try:
    import numba
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False

_FLAG = "RWSUM_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


_state = {"numba": _HAVE_NUMBA and not _env_disabled()}


def numba_available():
    return _HAVE_NUMBA


def numba_enabled():
    return _state["numba"]


def use_numba(flag: bool = True):
    """Enable or disable the compiled path; returns the previous setting."""
    prev = _state["numba"]
    _state["numba"] = bool(flag) and _HAVE_NUMBA
    return prev


if _HAVE_NUMBA:
    jit = functools.partial(numba.njit, cache=True, nogil=True)
else:  # pragma: no cover
    def jit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def dispatch(nb_impl, np_impl):
    """Return a callable that routes to ``nb_impl`` or ``np_impl`` at call time."""
    @functools.wraps(np_impl)
    def run(*args, **kwargs):
        if _state["numba"]:
            return nb_impl(*args, **kwargs)
        return np_impl(*args, **kwargs)
    run.numba_impl = nb_impl
    run.numpy_impl = np_impl
    return run
