# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. See ``mtfa._pykernels`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sin, cos, M_PI

cnp.import_array()


def lagrange_resample_rows(const double complex[:, ::1] data,
                           const double[:, ::1] pos,
                           int order):
    """out[r, j] = Lagrange interpolant of data[r, :] at fractional index pos[r, j]."""
    cdef Py_ssize_t R = data.shape[0], N = data.shape[1], M = pos.shape[1]
    out_arr = np.zeros((R, M), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t r, j, k, m, i0, idx
    cdef double u, w, frac
    cdef double nodes[64]
    cdef double weights[64]
    if order < 1 or order > 64:
        raise ValueError("order must lie in 1..64")
    cdef int half = (order - 1) // 2
    with nogil:
        for r in range(R):
            for j in range(M):
                u = pos[r, j]
                if u < -1.0 or u > N:
                    continue
                i0 = <Py_ssize_t>floor(u) - half
                frac = u - i0
                # weights of the stencil i0 .. i0+order-1 (nodes 0..order-1)
                for k in range(order):
                    w = 1.0
                    for m in range(order):
                        if m != k:
                            w = w * (frac - m) / (k - m)
                    weights[k] = w
                for k in range(order):
                    idx = i0 + k
                    if idx >= 0 and idx < N:
                        out[r, j] = out[r, j] + weights[k] * data[r, idx]
    return out_arr


def ndft_rows(const double complex[:, ::1] data,
              const double[::1] x,
              const double[::1] freqs,
              double sign):
    """out[r, k] = sum_j data[r, j] * exp(sign * 2 pi i freqs[k] x[j])."""
    cdef Py_ssize_t R = data.shape[0], N = data.shape[1], K = freqs.shape[0]
    out_arr = np.zeros((R, K), dtype=np.complex128)
    cos_arr = np.empty((K, N))
    sin_arr = np.empty((K, N))
    re_arr = np.ascontiguousarray(np.asarray(data).real)
    im_arr = np.ascontiguousarray(np.asarray(data).imag)
    cdef double complex[:, ::1] out = out_arr
    cdef double[:, ::1] ct = cos_arr
    cdef double[:, ::1] st = sin_arr
    cdef double[:, ::1] dre = re_arr
    cdef double[:, ::1] dim = im_arr
    cdef Py_ssize_t r, j, k
    cdef double ph, ar, ai, c, s
    with nogil:
        # one sincos per (k, j); the row loop then runs on real arithmetic only
        for k in range(K):
            for j in range(N):
                ph = sign * 2.0 * M_PI * freqs[k] * x[j]
                ct[k, j] = cos(ph)
                st[k, j] = sin(ph)
        for r in range(R):
            for k in range(K):
                ar = 0.0
                ai = 0.0
                for j in range(N):
                    c = ct[k, j]
                    s = st[k, j]
                    ar = ar + dre[r, j] * c - dim[r, j] * s
                    ai = ai + dre[r, j] * s + dim[r, j] * c
                out[r, k] = ar + 1j * ai
    return out_arr
