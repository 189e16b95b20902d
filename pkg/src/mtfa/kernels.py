"""Kernel dispatch: compiled Cython core if importable, numpy otherwise.

``ndft_rows`` defaults to numpy even when the extension is built: it is a
dense complex matrix product, and BLAS beats the compiled loop (see
``benchmarks/bench_kernels.py``). Pass ``backend="cython"`` to use it anyway.

Set ``MTFA_PURE_PYTHON=1`` to force the numpy path and ``MTFA_THREADS`` to
cap how many threads split the rows of a kernel call (the compiled kernels
release the GIL).
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

_compiled = None
if not os.environ.get("MTFA_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"

__all__ = ["BACKEND", "lagrange_resample_rows", "ndft_rows", "threads", "get_impl"]


def threads() -> int:
    try:
        n = int(os.environ.get("MTFA_THREADS", "0"))
    except ValueError:
        n = 0
    return max(1, n if n > 0 else (os.cpu_count() or 1))


def get_impl(backend: str | None = None):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "numpy":
        return _pykernels
    raise ValueError(f"unknown backend {backend!r}")


def _split_rows(fn, data, *args):
    nt = min(threads(), data.shape[0])
    if nt <= 1:
        return fn(data, *args)
    chunks = np.array_split(np.arange(data.shape[0]), nt)
    with ThreadPoolExecutor(nt) as ex:
        parts = list(ex.map(lambda ix: fn(np.ascontiguousarray(data[ix]), *[
            np.ascontiguousarray(a[ix]) if isinstance(a, np.ndarray) and a.ndim == 2 else a
            for a in args]), chunks))
    return np.concatenate(parts, axis=0)


def lagrange_resample_rows(data, pos, order=8, backend=None):
    """Evaluate each row's Lagrange interpolant at fractional indices ``pos``.

    Stencil points outside ``0..N-1`` count as zero.
    """
    impl = get_impl(backend)
    data = np.ascontiguousarray(data, dtype=complex)
    pos = np.ascontiguousarray(pos, dtype=float)
    return _split_rows(impl.lagrange_resample_rows, data, pos, int(order))


def ndft_rows(data, x, freqs, sign=-1.0, backend=None):
    """``out[r, k] = sum_j data[r, j] exp(sign 2 pi i freqs[k] x[j])``."""
    impl = get_impl(backend or "numpy")
    data = np.ascontiguousarray(np.atleast_2d(data), dtype=complex)
    x = np.ascontiguousarray(x, dtype=float)
    freqs = np.ascontiguousarray(freqs, dtype=float)
    return _split_rows(impl.ndft_rows, data, x, freqs, float(sign))
