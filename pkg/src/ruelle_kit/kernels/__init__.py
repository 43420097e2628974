"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``RUELLE_KIT_NUMBA`` is not set
to ``0``/``false``/``off``. Both backends are importable directly for
benchmarking as ``NUMPY_BACKEND`` and ``NUMBA_BACKEND``.
"""

import os
from types import SimpleNamespace

import numpy as np

from . import _numpy

_NAMES = ("compensated_sum", "rational_jet", "iterate_jet", "orbit", "aberth_batch")

NUMPY_BACKEND = SimpleNamespace(name="numpy", **{n: getattr(_numpy, n) for n in _NAMES})

def _pick_threading_layer():
    # numba probes TBB first and warns when the installed TBB is too old; prefer
    # OpenMP when it is available and the user has not chosen a layer
    if "NUMBA_THREADING_LAYER" in os.environ:
        return
    try:
        import numba
        import numba.np.ufunc.omppool  # noqa: F401
    except ImportError:
        return
    numba.config.THREADING_LAYER = "omp"


_pick_threading_layer()

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_BACKEND = None
else:
    NUMBA_BACKEND = SimpleNamespace(name="numba", **{n: getattr(_numba, n) for n in _NAMES})


def _numba_requested() -> bool:
    flag = os.environ.get("RUELLE_KIT_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


BACKEND = NUMBA_BACKEND if (NUMBA_BACKEND is not None and _numba_requested()) else NUMPY_BACKEND


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def compensated_sum(values) -> complex:
    values = _c(np.atleast_1d(values))
    if values.size == 0:
        return 0j
    return complex(BACKEND.compensated_sum(values))


def rational_jet(num, den, zs):
    return BACKEND.rational_jet(_c(num), _c(den), _c(np.atleast_1d(zs)))


def iterate_jet(num, den, zs, n: int):
    return BACKEND.iterate_jet(_c(num), _c(den), _c(np.atleast_1d(zs)), int(n))


def orbit(num, den, z0, n: int, escape: float):
    return BACKEND.orbit(_c(num), _c(den), complex(z0), int(n), float(escape))


def aberth_batch(rows, tol: float, maxiter: int):
    rows = _c(np.atleast_2d(rows))
    return BACKEND.aberth_batch(rows, float(tol), int(maxiter))
