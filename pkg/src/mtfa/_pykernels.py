"""Pure-numpy versions of the compiled kernels (always available)."""

import numpy as np


def lagrange_resample_rows(data, pos, order):
    data = np.ascontiguousarray(data, dtype=complex)
    pos = np.ascontiguousarray(pos, dtype=float)
    if not 1 <= order <= 64:
        raise ValueError("order must lie in 1..64")
    R, N = data.shape
    half = (order - 1) // 2
    i0 = np.floor(pos).astype(int) - half
    frac = pos - i0
    valid = (pos >= -1.0) & (pos <= N)
    out = np.zeros(pos.shape, dtype=complex)
    nodes = np.arange(order)
    rows = np.arange(R)[:, None]
    for k in range(order):
        w = np.ones_like(frac)
        for m in nodes:
            if m != k:
                w *= (frac - m) / (k - m)
        idx = i0 + k
        ok = valid & (idx >= 0) & (idx < N)
        vals = data[rows, np.clip(idx, 0, N - 1)]
        out += np.where(ok, w * vals, 0)
    return out


def ndft_rows(data, x, freqs, sign):
    data = np.asarray(data, dtype=complex)
    kern = np.exp(sign * 2j * np.pi * np.outer(np.asarray(x, float), np.asarray(freqs, float)))
    return data @ kern
