"""Hot loops for lattice compressions.

Two interchangeable backends: numba ``@njit`` kernels and a vectorised
numpy fallback. The numpy path is used when numba is missing or when the
environment variable ``CCRFOLNER_DISABLE_NUMBA`` is set to a non-empty
value other than ``0``. ``set_backend`` switches at runtime.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return deco


def _env_disabled() -> bool:
    val = os.environ.get("CCRFOLNER_DISABLE_NUMBA", "")
    return val not in ("", "0")


_backend = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str):
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@njit(cache=True)
def _assemble_numba(points, offsets, coeffs, gram, lo, width, out):
    k, n = points.shape
    sa = np.empty(n)
    for t in range(offsets.shape[0]):
        c = coeffs[t]
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += offsets[t, i] * gram[i, j]
            sa[j] = acc
        for col in range(k):
            row = 0
            inside = True
            for i in range(n):
                x = points[col, i] + offsets[t, i]
                if x < lo or x >= lo + width:
                    inside = False
                    break
                row = row * width + (x - lo)
            if not inside:
                continue
            s = 0.0
            for i in range(n):
                s += sa[i] * points[col, i]
            out[row, col] += c * np.exp(-0.5j * s)


def _assemble_numpy(points, offsets, coeffs, gram, lo, width, out):
    n = points.shape[1]
    radix = width ** np.arange(n - 1, -1, -1, dtype=np.int64)
    cols = np.arange(points.shape[0])
    for t in range(offsets.shape[0]):
        target = points + offsets[t]
        inside = np.all((target >= lo) & (target < lo + width), axis=1)
        rows = (target[inside] - lo) @ radix
        s = points[inside] @ (offsets[t] @ gram)
        # targets are distinct per term (translation is injective)
        out[rows, cols[inside]] += coeffs[t] * np.exp(-0.5j * s)


def assemble(points, offsets, coeffs, gram, lo, width):
    """Dense matrix of sum_t c_t pi(W(a_t)) compressed to the box.

    points  -- (k, n) int64 lattice coordinates, row-major box order
    offsets -- (t, n) int64 lattice coordinates of the support
    coeffs  -- (t,) complex
    gram    -- (n, n) float, sigma(g_i, g_j)
    lo, width -- box is [lo, lo + width) on every axis
    """
    points = np.ascontiguousarray(points, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64).reshape(-1, points.shape[1])
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    gram = np.ascontiguousarray(gram, dtype=np.float64)
    k = points.shape[0]
    out = np.zeros((k, k), dtype=np.complex128)
    if _backend == "numba":
        _assemble_numba(points, offsets, coeffs, gram, int(lo), int(width), out)
    else:
        _assemble_numpy(points, offsets, coeffs, gram, int(lo), int(width), out)
    return out
