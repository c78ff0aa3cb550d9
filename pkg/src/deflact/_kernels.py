"""Hot inner kernels: periodic 2-d convolution by direct summation.

Two interchangeable implementations exist, a numba ``@njit`` kernel and a
pure-numpy one. ``DEFLACT_BACKEND`` selects the default:

* unset / ``auto``: numba when importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the fallback (no JIT warmup)

Both iterate PSF entries in the same row-major order, so per-element
accumulation order is identical and results agree to the last bit in
practice. ``benchmarks/bench_convolution.py`` times one against the other.
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("DEFLACT_BACKEND", "auto").strip().lower()
if _requested not in ("", "auto", "numba", "numpy"):
    raise RuntimeError(f"DEFLACT_BACKEND={_requested!r}: expected auto, numba or numpy")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAVE_NUMBA = False
    if _requested == "numba":
        raise RuntimeError("DEFLACT_BACKEND=numba but numba is not importable")


def conv2d_periodic_numpy(img, row_map, col_map, weights):
    """Accumulate sum_k weights[k] * img[row_map[k]][:, col_map[k]]."""
    out = np.zeros_like(img)
    for k in range(weights.size):
        out += weights[k] * img[row_map[k]][:, col_map[k]]
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def conv2d_periodic_numba(img, row_map, col_map, weights):
        rows, cols = img.shape
        out = np.zeros((rows, cols))
        for k in range(weights.size):
            w = weights[k]
            for i in range(rows):
                src = img[row_map[k, i]]
                dst = out[i]
                cm = col_map[k]
                for j in range(cols):
                    dst[j] += w * src[cm[j]]
        return out

else:  # pragma: no cover
    conv2d_periodic_numba = None


_ACTIVE = "numba" if (_HAVE_NUMBA and _requested != "numpy") else "numpy"


def active_backend() -> str:
    """Name of the kernel implementation selected at import time."""
    return _ACTIVE


def available_backends() -> tuple:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def conv2d_periodic(img, row_map, col_map, weights, backend=None):
    """Periodic convolution given precomputed gather index maps.

    ``row_map[k, i]`` and ``col_map[k, j]`` are the source indices for PSF
    entry k, so ``out[i, j] = sum_k weights[k] * img[row_map[k,i], col_map[k,j]]``.
    """
    impl = backend or _ACTIVE
    if impl == "numba":
        if conv2d_periodic_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return conv2d_periodic_numba(img, row_map, col_map, weights)
    if impl == "numpy":
        return conv2d_periodic_numpy(img, row_map, col_map, weights)
    raise ValueError(f"unknown backend {impl!r}")
