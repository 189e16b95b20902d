"""Time-frequency distributions on grids.

``wigner_A_grid`` computes ``W_A(f, g) = A^(f x conj g)`` for any ``4 x 4``
projection, either through the generator chain (general path) or, for
shift-invertible ``A``, as a chirped and linearly rescaled STFT (fast path).
``named_distribution`` evaluates the classical formulas directly so the two
can be checked against each other.

All grids here are one-dimensional signals (``d = 1``).
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .gaussian import ChirpFunction
from .metaplectic import (
    SampledSignal,
    TimeFrequencyGrid,
    apply_discrete,
    centered_dft,
    factorize,
    grid_coords,
    linear_resample,
    phase_blind_compare,
    resample_axis,
)
from .symplectic import (
    BlockSymplectic,
    derived_blocks,
    is_covariant,
    is_invertible,
    is_shift_invertible,
    make_composite,
    make_named,
    omega,
    tensor_embed,
)

__all__ = [
    "KINDS",
    "CohenMultiplier",
    "wigner_A_grid",
    "deform_window",
    "stft_grid",
    "named_distribution",
    "projection_of",
    "tf_shift",
    "shift_grid",
    "covariance_check",
    "cohen_multiplier_check",
    "moyal_check",
    "ambiguity_projection",
]

KINDS = ("stft", "tau", "wigner", "ambiguity", "rihaczek", "spectrogram", "genspec", "hbar", "newwv")

# "auto" takes the fast path only when E_A is well conditioned and G_A has
# no chirp part (zero diagonal), so the deformed window is a rescaled and
# possibly Fourier-transformed copy of g; chirped windows alias on the grid
FAST_PATH_COND = 10.0


def _same_grid(f: SampledSignal, g: SampledSignal):
    if f.N != g.N or not np.isclose(f.dx, g.dx, rtol=1e-12):
        raise ValueError("f and g must live on the same grid")


def _as_bs(A):
    return A if isinstance(A, BlockSymplectic) else BlockSymplectic(A)


def wigner_A_grid(A, f: SampledSignal, g: SampledSignal, method: str = "auto",
                  check_paths: bool = False, resample: str = "fourier", order: int = 8) -> TimeFrequencyGrid:
    """Sampled ``W_A(f, g)``.

    Parameters
    ----------
    method : {"auto", "general", "fast"}
        ``general`` applies the factorization of ``A`` to ``f x conj(g)``;
        ``fast`` uses the rescaled-STFT identity (shift-invertible ``A``
        only, and a self-dual grid ``N dx^2 = 1``). ``auto`` takes the fast
        path when it is available and ``E_A`` is well conditioned.
    check_paths : bool
        Also compute the other path and store the phase-blind residual in
        ``meta["path_residual"]``.
    """
    A = _as_bs(A)
    if A.n != 2:
        raise ValueError("sampled distributions are implemented for d = 1")
    _same_grid(f, g)
    fast_ok = is_shift_invertible(A) and np.isclose(f.N * f.dx**2, 1.0, rtol=1e-9)
    if method == "auto":
        method = "fast" if fast_ok and _fast_path_safe(A) else "general"
    if method == "fast":
        if not fast_ok:
            raise ValueError("fast path needs a shift-invertible A on a self-dual grid")
        W = _fast_path(A, f, g, resample, order)
    elif method == "general":
        W = _general_path(A, f, g, resample, order)
    else:
        raise ValueError(f"unknown method {method!r}")
    if check_paths and fast_ok:
        other = _general_path(A, f, g, resample, order) if method == "fast" else _fast_path(A, f, g, resample, order)
        _, res = phase_blind_compare(W.values, other.values)
        W = W.with_values(W.values, path_residual=res)
    return W


def _fast_path_safe(A) -> bool:
    dv = derived_blocks(A)
    return bool(np.linalg.cond(dv.E) <= FAST_PATH_COND and np.max(np.abs(np.diag(dv.G))) <= 1e-12)


def _general_path(A, f, g, resample, order):
    fact = factorize(A, balanced=True)
    F = TimeFrequencyGrid(np.outer(f.values, np.conj(g.values)), f.dx, g.dx, {"spill": 0.0})
    W = apply_discrete(fact, F, method=resample, order=order)
    return W.with_values(W.values, source=A.matrix.tolist(), path="general")


def deform_window(A, g: SampledSignal, resample: str = "fourier", order: int = 8) -> SampledSignal:
    """``delta_A g = F(conj(G_A^(conj g)))`` via the factorization of ``G_A``."""
    A = _as_bs(A)
    G = derived_blocks(A).G
    if G is None:
        raise ValueError("A is not shift-invertible: the deformation operator is undefined")
    fact = factorize(BlockSymplectic(G), balanced=True)
    h = apply_discrete(fact, SampledSignal(np.conj(g.values), g.dx, {"spill": 0.0}), method=resample, order=order)
    out = centered_dft(np.conj(h.values), 0, h.dx)
    return SampledSignal(out, 1.0 / (h.N * h.dx), h.meta)


def _fast_path(A, f, g, resample, order):
    dv = derived_blocks(A)
    Einv = np.linalg.inv(dv.E)
    h = deform_window(A, g, resample, order)
    V = stft_grid(f, h)
    # Phi_M(E^{-1} z) |det E|^{-1/2} V(E^{-1} z) = T_{E^{-1}}(Phi_M V)(z); the
    # chirp is applied before resampling so the resampled field is smooth
    U = V.values * ChirpFunction(dv.M)(V.points())
    vals = linear_resample(U, V.dx, Einv, resample, order)
    e0 = np.sum(np.abs(U) ** 2)
    e1 = np.sum(np.abs(vals) ** 2)
    spill = 1 - (1 - max(0.0, 1 - e1 / e0)) * (1 - h.meta.get("spill", 0.0))
    return TimeFrequencyGrid(vals, V.dx, V.dxi, {"spill": spill, "source": A.matrix.tolist(), "path": "fast"})


def _shift_matrix(values: np.ndarray, cyclic: bool = False) -> np.ndarray:
    """``S[i, j] = values(x_j - x_i)`` for on-grid shifts ``x_i``."""
    N = values.size
    i = np.arange(N)[:, None]
    j = np.arange(N)[None, :]
    idx = j - i + N // 2
    if cyclic:
        return values[idx % N]
    out = np.where((idx >= 0) & (idx < N), values[np.clip(idx, 0, N - 1)], 0)
    return out


def stft_grid(f: SampledSignal, g: SampledSignal, cyclic: bool = False) -> TimeFrequencyGrid:
    """``V_g f(x_i, xi_k) = int f(t) conj(g(t - x_i)) exp(-2 pi i xi_k t) dt``."""
    _same_grid(f, g)
    prod = f.values[None, :] * np.conj(_shift_matrix(g.values, cyclic))
    vals = centered_dft(prod, 1, f.dx)
    return TimeFrequencyGrid(vals, f.dx, 1.0 / (f.N * f.dx), {"spill": 0.0})


def _window(w, like: SampledSignal) -> SampledSignal:
    if isinstance(w, SampledSignal):
        return w
    if isinstance(w, str):
        v = np.zeros(like.N, dtype=complex)
        if w == "delta":
            v[like.N // 2] = 1.0 / like.dx
        elif w == "one":
            v[:] = 1.0
        else:
            raise ValueError(f"unknown window {w!r}")
        return SampledSignal(v, like.dx)
    return SampledSignal(np.asarray(w, dtype=complex), like.dx)


def _tau_direct(f, g, tau):
    N, dx = f.N, f.dx
    x = f.x
    rows_f = np.broadcast_to(f.values, (N, N))
    rows_g = np.broadcast_to(g.values, (N, N))
    fv = resample_axis(rows_f, 1, dx, float(tau), x[:, None])
    gv = resample_axis(rows_g, 1, dx, -(1.0 - float(tau)), x[:, None])
    vals = centered_dft(fv * np.conj(gv), 1, dx)
    return TimeFrequencyGrid(vals, dx, 1.0 / (N * dx), {"spill": 0.0})


def _ambiguity_direct(f, g):
    N, dx = f.N, f.dx
    x = f.x
    fv = resample_axis(np.broadcast_to(f.values, (N, N)), 1, dx, 1.0, x[:, None] / 2)
    gv = resample_axis(np.broadcast_to(g.values, (N, N)), 1, dx, 1.0, -x[:, None] / 2)
    vals = centered_dft(fv * np.conj(gv), 1, dx)
    return TimeFrequencyGrid(vals, dx, 1.0 / (N * dx), {"spill": 0.0})


def _rihaczek_direct(f, g):
    gh = centered_dft(g.values, 0, g.dx)
    dxi = 1.0 / (g.N * g.dx)
    xi = grid_coords(g.N, dxi)
    vals = f.values[:, None] * np.conj(gh)[None, :] * np.exp(-2j * np.pi * np.outer(f.x, xi))
    return TimeFrequencyGrid(vals, f.dx, dxi, {"spill": 0.0})


def _hbar_direct(f, g, hbar):
    N, dx = f.N, f.dx
    c = 2 * np.pi * hbar
    dxi = 1.0 / (N * dx)
    xi = grid_coords(N, dxi)
    prod = f.values[None, :] * np.conj(_shift_matrix(g.values))
    V = kernels.ndft_rows(prod, f.x, xi / c, -1.0) * dx
    vals = c**-0.5 * np.exp(2j * np.pi * np.outer(f.x, xi) / (4 * np.pi * hbar)) * V
    return TimeFrequencyGrid(vals, dx, dxi, {"spill": 0.0})


def _newwv_direct(f, g, S, S1, S2):
    from .metaplectic import factorize as _fz

    S, S1, S2 = (_as_bs(m) for m in (S, S1, S2))
    f1 = apply_discrete(_fz(S1, balanced=True), f) if not np.allclose(S1.matrix, np.eye(2)) else f
    g2 = apply_discrete(_fz(S2, balanced=True), g) if not np.allclose(S2.matrix, np.eye(2)) else g
    if not np.isclose(f1.dx, g2.dx):
        raise ValueError("S1 and S2 must leave the grid spacing compatible")
    N, dx = f1.N, f1.dx
    x = f1.x
    # T_{M_1/2}: F(x, t) = f1(x + t/2) conj(g2(x - t/2))
    fv = resample_axis(np.broadcast_to(f1.values, (N, N)), 1, dx, 0.5, x[:, None])
    gv = resample_axis(np.broadcast_to(g2.values, (N, N)), 1, dx, -0.5, x[:, None])
    F = fv * np.conj(gv)
    fact = _fz(tensor_embed(S), balanced=True)
    out = apply_discrete(fact, TimeFrequencyGrid(F, dx, dx, {"spill": 0.0}))
    return out


def named_distribution(kind: str, f: SampledSignal, g: SampledSignal | None = None, **args) -> TimeFrequencyGrid:
    """Direct evaluation of a classical distribution (cross form when ``g`` is given).

    ``kind`` is one of :data:`KINDS`. Extra arguments: ``tau`` for
    ``"tau"``, ``hbar`` for ``"hbar"``, ``phi``/``psi`` windows for
    ``"genspec"`` (arrays, signals or the strings ``"delta"``/``"one"``),
    ``S, S1, S2`` for ``"newwv"``.
    """
    if g is None:
        g = f
    _same_grid(f, g)
    if kind in ("stft", "spectrogram"):
        if not np.any(g.values):
            raise ValueError("zero window")
        V = stft_grid(f, g)
        if kind == "spectrogram":
            return V.with_values(np.abs(V.values) ** 2)
        return V
    if kind == "tau":
        return _tau_direct(f, g, args.get("tau", 0.5))
    if kind == "wigner":
        return _tau_direct(f, g, 0.5)
    if kind == "ambiguity":
        return _ambiguity_direct(f, g)
    if kind == "rihaczek":
        return _rihaczek_direct(f, g)
    if kind == "hbar":
        hbar = args.get("hbar")
        if hbar is None or not hbar > 0:
            raise ValueError("hbar must be positive")
        return _hbar_direct(f, g, hbar)
    if kind == "genspec":
        phi = _window(args.get("phi", "delta"), f)
        psi = _window(args.get("psi", "one"), f)
        if not np.any(phi.values) or not np.any(psi.values):
            raise ValueError("zero window")
        Vf = stft_grid(f, phi, cyclic=True)
        Vg = stft_grid(g, psi, cyclic=True)
        return Vf.with_values(Vf.values * np.conj(Vg.values))
    if kind == "newwv":
        return _newwv_direct(f, g, args["S"], args["S1"], args["S2"])
    raise ValueError(f"unknown distribution {kind!r}")


def ambiguity_projection() -> BlockSymplectic:
    """Projection of ``F_2 T_M`` with ``T_M F(x, t) = F(t + x/2, t - x/2)``."""
    M = np.array([[0.5, 1.0], [-0.5, 1.0]])
    Z = np.zeros((2, 2))
    DM = np.block([[np.linalg.inv(M), Z], [Z, M.T]])
    return BlockSymplectic(tensor_embed(BlockSymplectic(omega(1))).matrix @ DM)


def projection_of(kind: str, **args) -> BlockSymplectic | None:
    """The ``4 x 4`` projection whose ``W_A`` reproduces ``kind`` (``None`` for spectrograms)."""
    if kind in ("stft", "spectrogram"):
        return make_named("stft")
    if kind == "tau":
        return make_named("tau", tau=args.get("tau", 0.5))
    if kind == "wigner":
        return make_named("wigner")
    if kind == "rihaczek":
        return make_named("rihaczek")
    if kind == "ambiguity":
        return ambiguity_projection()
    if kind == "hbar":
        return make_named("hbar", hbar=args["hbar"])
    if kind == "genspec":
        phi, psi = args.get("phi", "delta"), args.get("psi", "one")
        if isinstance(phi, str) and isinstance(psi, str) and (phi, psi) == ("delta", "one"):
            return make_named("rihaczek")
        return None
    if kind == "newwv":
        return make_composite(_as_bs(args["S"]), _as_bs(args["S1"]), _as_bs(args["S2"]))
    raise ValueError(f"unknown distribution {kind!r}")


def tf_shift(z, f: SampledSignal, cyclic: bool = False) -> SampledSignal:
    """``pi(x0, xi0) f(t) = exp(2 pi i xi0 t) f(t - x0)``.

    On-grid ``x0`` shifts whole samples (zero fill, or wrap-around with
    ``cyclic``); other shifts use band-limited interpolation. The energy
    pushed off the grid is stored in ``meta["spill"]``.
    """
    x0, xi0 = (float(v) for v in z)
    m = x0 / f.dx
    v = f.values
    if abs(m - round(m)) < 1e-9:
        m = int(round(m))
        if cyclic:
            shifted = np.roll(v, m)
        else:
            shifted = np.zeros_like(v)
            if m >= 0:
                shifted[m:] = v[: f.N - m] if m < f.N else []
            else:
                shifted[: f.N + m] = v[-m:]
    else:
        shifted = resample_axis(v, 0, f.dx, 1.0, -x0)
    out = np.exp(2j * np.pi * xi0 * f.x) * shifted
    e0 = np.sum(np.abs(v) ** 2)
    spill = max(0.0, 1 - np.sum(np.abs(out) ** 2) / e0) if e0 > 0 else 0.0
    return SampledSignal(out, f.dx, {**f.meta, "spill": spill})


def shift_grid(W: TimeFrequencyGrid, z) -> TimeFrequencyGrid:
    """``W(. - z)`` for on-grid ``z`` (whole-sample shift, zero fill)."""
    m = z[0] / W.dx
    n = z[1] / W.dxi
    if abs(m - round(m)) > 1e-9 or abs(n - round(n)) > 1e-9:
        raise ValueError("grid translation needs an on-grid z")
    m, n = int(round(m)), int(round(n))
    out = np.zeros_like(W.values)
    N = W.N
    src = W.values[max(0, -m): N - max(0, m), max(0, -n): N - max(0, n)]
    out[max(0, m): N - max(0, -m), max(0, n): N - max(0, -n)] = src
    return W.with_values(out)


def covariance_check(A, z, f: SampledSignal, g: SampledSignal, modulus: bool = False, method: str = "auto") -> float:
    """``|W_A(pi(z)f, pi(z)g) - W_A(f,g)(. - z)| / |W_A(f,g)|``.

    With ``modulus=True`` the moduli ``|W_A(pi(z)f, pi(z)g)|`` and
    ``|W_A(f, g)|`` are compared without translation: for the STFT a joint
    shift of signal and window only changes the phase.
    """
    N = f.N
    dxi = 1.0 / (N * f.dx)
    for val, h in ((z[0], f.dx), (z[1], dxi)):
        if abs(val / h - round(val / h)) > 1e-9:
            raise ValueError("covariance_check needs an on-grid z")
    W = wigner_A_grid(A, f, g, method=method)
    Wz = wigner_A_grid(A, tf_shift(z, f), tf_shift(z, g), method=method)
    ref = shift_grid(W, z)
    if modulus:
        return float(np.linalg.norm(np.abs(Wz.values) - np.abs(W.values)) / np.linalg.norm(W.values))
    return float(np.linalg.norm(Wz.values - ref.values) / np.linalg.norm(W.values))


class CohenMultiplier:
    """``Phi_{-B_A}`` on the Fourier grid of a time-frequency grid."""

    # stored sign of the exponent; see cohen_multiplier_check
    SIGN = -1.0

    def __init__(self, B):
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if np.max(np.abs(B - B.T)) > 1e-10:
            raise ValueError("B_A must be symmetric")
        self.B = (B + B.T) / 2

    def __call__(self, zeta):
        return ChirpFunction(self.SIGN * self.B)(zeta)


def cohen_multiplier_check(A, f: SampledSignal, g: SampledSignal, method: str = "auto") -> float:
    """Phase-blind residual of ``F(W_A) = Phi_{-B_A} F(W)`` on the Fourier grid."""
    A = _as_bs(A)
    if not is_covariant(A):
        raise ValueError("cohen_multiplier_check needs a covariant projection")
    B = derived_blocks(A).B
    WA = wigner_A_grid(A, f, g, method=method)
    W = wigner_A_grid(make_named("wigner"), f, g, method=method)
    X = centered_dft(WA.values, (0, 1), (WA.dx, WA.dxi))
    Y = centered_dft(W.values, (0, 1), (W.dx, W.dxi))
    zeta = TimeFrequencyGrid(Y, 1.0 / (W.N * W.dx), 1.0 / (W.N * W.dxi)).points()
    _, res = phase_blind_compare(X, CohenMultiplier(B)(zeta) * Y)
    return res


def moyal_check(A, f1, g1, f2, g2, method: str = "auto") -> float:
    """Relative error of ``<W_A(f1,g1), W_A(f2,g2)> = <f1,f2> conj(<g1,g2>)``."""
    W1 = wigner_A_grid(A, f1, g1, method=method)
    W2 = wigner_A_grid(A, f2, g2, method=method)
    lhs = W1.inner(W2)
    rhs = f1.inner(f2) * np.conj(g1.inner(g2))
    scale = f1.norm() * f2.norm() * g1.norm() * g2.norm()
    return float(abs(lhs - rhs) / scale)
