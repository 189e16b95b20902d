"""Metaplectic atoms, Gabor frames and inversion formulas for shift-invertible ``A``.

For shift-invertible ``A`` the distribution is a sampled inner product
against metaplectic atoms,

    W_A(f, g)(z) = <f, pi_A(z) g>,
    pi_A(z) g = |det E|^{-1/2} conj(Phi_M(E^{-1} z)) pi(E^{-1} z) h,

with ``h = delta_A g`` the deformed window. The global constant that the
representation leaves free is fixed to one here, consistently with the fast
path of :func:`mtfa.distributions.wigner_A_grid`. Frame operators only see
``|c|^2`` so the choice never matters for reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .distributions import deform_window, wigner_A_grid
from .gaussian import ChirpFunction
from .metaplectic import (
    SampledSignal,
    apply_discrete,
    centered_idft,
    factorize,
    linear_resample,
    phase_blind_compare,
    resample_axis,
)
from .symplectic import BlockSymplectic, derived_blocks, is_shift_invertible

__all__ = [
    "ConventionError",
    "NotAFrameError",
    "Lattice",
    "FrameSystem",
    "DualWindow",
    "deformation_window",
    "undeform_window",
    "atom",
    "atoms",
    "coefficients",
    "frame_operator",
    "dual_window",
    "reconstruct",
    "inversion_integral",
]

CG_TOL = 1e-10
CG_MAXITER = 500
POWER_STEPS = 200
# lower/upper bound ratio below which the system is reported as degenerate
FRAME_RATIO_MIN = 1e-8
VALIDATION_TOL = 1e-2


class ConventionError(RuntimeError):
    """The two constructions of the deformed window disagree."""

    def __init__(self, message, primary=None, validation=None, residual=None):
        super().__init__(message)
        self.primary = primary
        self.validation = validation
        self.residual = residual


class NotAFrameError(RuntimeError):
    """The truncated system is not a frame (CG stagnation or vanishing lower bound)."""

    def __init__(self, message, bounds=None, iterations=None, residual=None):
        super().__init__(message)
        self.bounds = bounds
        self.iterations = iterations
        self.residual = residual


def _require_si(A) -> BlockSymplectic:
    A = A if isinstance(A, BlockSymplectic) else BlockSymplectic(A)
    if A.n != 2:
        raise ValueError("frames are implemented for d = 1")
    if not is_shift_invertible(A):
        raise ValueError("A is not shift-invertible: metaplectic atoms are not available")
    return A


# ----------------------------------------------------------------------------
# deformed window


def deformation_window(A, g: SampledSignal, validate: bool = False, f: SampledSignal | None = None) -> SampledSignal:
    """``delta_A g`` from the factorization of ``G_A``.

    With ``validate=True`` the window is also extracted from a computed
    ``W_A(f, g)`` (``f`` a fixed Gaussian unless given) and the two are
    compared phase-blind; a mismatch raises :class:`ConventionError`.
    """
    A = _require_si(A)
    h = deform_window(A, g)
    if validate:
        if f is None:
            f = SampledSignal.from_function(lambda t: 2**0.25 * np.exp(-np.pi * t**2), g.N, g.dx)
        hv = _extract_window(A, f, g)
        alpha, res = phase_blind_compare(hv.values, h.values)
        if res > VALIDATION_TOL:
            raise ConventionError(
                f"deformed window mismatch: residual {res:.3e}", primary=h, validation=hv, residual=res
            )
        h = h.with_values(h.values, validation_residual=res)
    return h


def _extract_window(A, f: SampledSignal, g: SampledSignal) -> SampledSignal:
    """Recover ``h`` from ``W_A(f, g)`` computed through the generator chain."""
    dv = derived_blocks(A)
    W = wigner_A_grid(A, f, g, method="general")
    # T_E W = Phi_M V_h f, then undo the chirp
    V = linear_resample(W.values, W.dx, dv.E) * np.conj(ChirpFunction(dv.M)(W.points()))
    # inverse transform along xi: P[i, j] = f(t_j) conj(h(t_j - x_i))
    P = centered_idft(V, 1, W.dxi)
    N = f.N
    i = np.arange(N)[:, None]
    j = np.arange(N)[None, :]
    u = j - i + N // 2
    valid = (u >= 0) & (u < N)
    wts = np.broadcast_to(np.abs(f.values[None, :]) ** 2, (N, N))
    num = np.zeros(N, dtype=complex)
    den = np.zeros(N)
    contrib = np.conj(np.conj(f.values)[None, :] * P)
    np.add.at(num, u[valid], contrib[valid])
    np.add.at(den, u[valid], wts[valid])
    h = np.where(den > 1e-300, num / np.maximum(den, 1e-300), 0)
    return SampledSignal(h, f.dx, {"path": "extracted"})


def undeform_window(A, h: SampledSignal) -> SampledSignal:
    """Inverse of :func:`deformation_window`: ``conj(G_A^{-1} conj(F^{-1} h))``."""
    A = _require_si(A)
    G = derived_blocks(A).G
    fact = factorize(BlockSymplectic(G), balanced=True).inverse()
    u = np.conj(centered_idft(h.values, 0, 1.0 / (h.N * h.dx)))
    out = apply_discrete(fact, SampledSignal(u, h.dx, {"spill": 0.0}))
    return SampledSignal(np.conj(out.values), out.dx, out.meta)


# ----------------------------------------------------------------------------
# atoms


def _shifted_rows(h: SampledSignal, x0: np.ndarray) -> np.ndarray:
    """Rows ``h(t - x0_k)``: index shifts when on grid, interpolation otherwise."""
    N, dx = h.N, h.dx
    x0 = np.asarray(x0, dtype=float)
    m = x0 / dx
    on = np.abs(m - np.round(m)) < 1e-9
    out = np.zeros((x0.size, N), dtype=complex)
    if np.any(on):
        idx = np.arange(N)[None, :] - np.round(m[on]).astype(int)[:, None]
        ok = (idx >= 0) & (idx < N)
        out[on] = np.where(ok, h.values[np.clip(idx, 0, N - 1)], 0)
    if np.any(~on):
        k = int(np.sum(~on))
        out[~on] = resample_axis(np.broadcast_to(h.values, (k, N)), 1, dx, 1.0, -x0[~on][:, None])
    return out


def _atom_rows(A, h: SampledSignal, z: np.ndarray) -> np.ndarray:
    dv = derived_blocks(A)
    Einv = np.linalg.inv(dv.E)
    mu = np.atleast_2d(z) @ Einv.T
    rows = _shifted_rows(h, mu[:, 0]) * np.exp(2j * np.pi * np.outer(mu[:, 1], h.x))
    c = abs(np.linalg.det(dv.E)) ** -0.5 * np.conj(ChirpFunction(dv.M)(mu))
    return c[:, None] * rows


def atoms(A, z, g: SampledSignal, h: SampledSignal | None = None) -> np.ndarray:
    """Matrix whose rows are ``pi_A(z_k) g`` for the points ``z`` (shape ``(K, 2)``)."""
    A = _require_si(A)
    if h is None:
        h = deformation_window(A, g)
    return _atom_rows(A, h, np.asarray(z, dtype=float))


def atom(A, z, g: SampledSignal) -> SampledSignal:
    """A single atom ``pi_A(z) g``."""
    row = atoms(A, np.asarray(z, dtype=float)[None, :], g)[0]
    return SampledSignal(row, g.dx)


# ----------------------------------------------------------------------------
# lattices and frame systems


@dataclass(frozen=True)
class Lattice:
    """``a Z x b Z`` truncated to a box of half-width ``R`` (grid extent when ``None``)."""

    a: float
    b: float
    R: float | None = None

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("lattice parameters must be positive")
        if self.R is not None and not self.R > 0:
            raise ValueError("truncation radius must be positive")

    def check_grid(self, N: int, dx: float):
        dxi = 1.0 / (N * dx)
        for val, h, name in ((self.a, dx, "a"), (self.b, dxi, "b")):
            if abs(val / h - round(val / h)) > 1e-9:
                raise ValueError(f"{name} = {val} is not a multiple of the grid spacing {h}")

    def points(self, N: int, dx: float, Einv=None) -> np.ndarray:
        """Lattice points in the box whose image under ``Einv`` stays on the grid."""
        self.check_grid(N, dx)
        L, Om = N * dx / 2, 1.0 / (2 * dx)
        E = np.linalg.inv(Einv) if Einv is not None else np.eye(2)
        # box large enough to contain E([-L, L) x [-Om, Om))
        ext = np.abs(E) @ np.array([L, Om])
        rx = ext[0] if self.R is None else min(ext[0], self.R)
        rxi = ext[1] if self.R is None else min(ext[1], self.R)
        xs = self.a * np.arange(-np.floor(rx / self.a), np.floor(rx / self.a) + 1)
        xis = self.b * np.arange(-np.floor(rxi / self.b), np.floor(rxi / self.b) + 1)
        pts = np.stack(np.meshgrid(xs, xis, indexing="ij"), -1).reshape(-1, 2)
        mu = pts @ (np.eye(2) if Einv is None else np.asarray(Einv)).T
        keep = (mu[:, 0] >= -L - 1e-12) & (mu[:, 0] < L - 1e-12) & (mu[:, 1] >= -Om - 1e-12) & (mu[:, 1] < Om - 1e-12)
        return pts[keep]

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "R": self.R}


@dataclass
class FrameSystem:
    """Atoms of ``g`` over a truncated lattice, for a shift-invertible ``A``."""

    A: BlockSymplectic
    g: SampledSignal
    lattice: Lattice
    h: SampledSignal = field(init=False)
    points: np.ndarray = field(init=False)
    matrix: np.ndarray = field(init=False, repr=False)
    bounds: tuple | None = None

    def __post_init__(self):
        self.A = _require_si(self.A)
        self.h = deformation_window(self.A, self.g)
        Einv = np.linalg.inv(derived_blocks(self.A).E)
        self.points = self.lattice.points(self.g.N, self.g.dx, Einv)
        if len(self.points) == 0:
            raise ValueError("empty lattice at this truncation")
        self.matrix = _atom_rows(self.A, self.h, self.points)

    def analysis(self, f: SampledSignal) -> np.ndarray:
        """``W_A(f, g)(lambda) = <f, pi_A(lambda) g>``."""
        return (self.matrix.conj() @ f.values) * f.dx

    def synthesis(self, coeffs, rows=None) -> np.ndarray:
        rows = self.matrix if rows is None else rows
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (rows.shape[0],):
            raise ValueError(f"expected {rows.shape[0]} coefficients, got shape {coeffs.shape}")
        return coeffs @ rows

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.synthesis((self.matrix.conj() @ v) * self.g.dx)

    def operator_matrix(self) -> np.ndarray:
        """Dense ``S_A`` on the grid (``N x N``)."""
        return (self.matrix.T @ self.matrix.conj()) * self.g.dx


def frame_operator(A, g: SampledSignal, lattice: Lattice, f: SampledSignal) -> SampledSignal:
    """``S_A f = sum_lambda W_A(f, g)(lambda) pi_A(lambda) g`` over the truncated lattice."""
    fs = FrameSystem(A, g, lattice)
    return SampledSignal(fs.apply(f.values), f.dx)


def _cg(apply, b, tol=CG_TOL, maxiter=CG_MAXITER):
    """Conjugate gradients for a Hermitian positive operator; returns (x, iterations, relres)."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    bn = np.linalg.norm(b)
    if bn == 0:
        return x, 0, 0.0
    rr = np.vdot(r, r).real
    for it in range(1, maxiter + 1):
        Ap = apply(p)
        pAp = np.vdot(p, Ap).real
        if pAp <= 0:
            return x, it, np.sqrt(rr) / bn
        alpha = rr / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        if np.sqrt(rr_new) / bn <= tol:
            return x, it, np.sqrt(rr_new) / bn
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, maxiter, np.sqrt(rr) / bn


def _power(apply, N, steps, rng):
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(steps):
        w = apply(v)
        lam = np.vdot(v, w).real
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0:
            break
        v = w / nw
    return lam


def frame_bounds(fs: FrameSystem, steps: int = POWER_STEPS, seed: int = 0) -> tuple[float, float]:
    """Power iteration on ``S_A`` and on its inverse (dense solve on the grid)."""
    rng = np.random.default_rng(seed)
    S = fs.operator_matrix()
    upper = _power(lambda v: S @ v, fs.g.N, steps, rng)
    try:
        inv = _power(lambda v: np.linalg.solve(S, v), fs.g.N, steps, rng)
        lower = 1.0 / inv if inv > 0 else 0.0
    except np.linalg.LinAlgError:
        lower = 0.0
    return float(lower), float(upper)


class DualWindow(NamedTuple):
    gamma: SampledSignal
    bounds: tuple
    iterations: int
    residual: float


def dual_window(A, g: SampledSignal, lattice: Lattice, tol: float = CG_TOL, maxiter: int = CG_MAXITER,
                system: FrameSystem | None = None) -> DualWindow:
    """Canonical dual ``gamma_A = delta_A^{-1} S_A^{-1} delta_A g``.

    Raises
    ------
    NotAFrameError
        If CG does not reach ``tol`` within ``maxiter`` iterations or the
        estimated lower frame bound is negligible against the upper one.
    """
    fs = system if system is not None else FrameSystem(A, g, lattice)
    bounds = frame_bounds(fs)
    x, its, res = _cg(fs.apply, fs.h.values.astype(complex), tol, maxiter)
    if res > tol or bounds[0] <= FRAME_RATIO_MIN * bounds[1]:
        raise NotAFrameError(
            f"not a frame at this truncation (CG residual {res:.2e} after {its} iterations, "
            f"bounds {bounds[0]:.3e}, {bounds[1]:.3e})",
            bounds=bounds, iterations=its, residual=res,
        )
    fs.bounds = bounds
    gamma = undeform_window(fs.A, SampledSignal(x, g.dx))
    return DualWindow(gamma, bounds, its, float(res))


def coefficients(A, g: SampledSignal, lattice: Lattice, f: SampledSignal) -> np.ndarray:
    """Frame coefficients ``W_A(f, g)(lambda)`` in the order of ``Lattice.points``."""
    return FrameSystem(A, g, lattice).analysis(f)


def reconstruct(A, g: SampledSignal, gamma: SampledSignal, lattice: Lattice, coeffs) -> SampledSignal:
    """``sum_lambda coeffs(lambda) pi_A(lambda) gamma``."""
    A = _require_si(A)
    Einv = np.linalg.inv(derived_blocks(A).E)
    pts = lattice.points(g.N, g.dx, Einv)
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (len(pts),):
        raise ValueError(f"expected {len(pts)} coefficients, got shape {coeffs.shape}")
    rows = atoms(A, pts, gamma)
    return SampledSignal(coeffs @ rows, g.dx)


def inversion_integral(A, g: SampledSignal, gamma: SampledSignal, f: SampledSignal, chunk: int = 4096) -> SampledSignal:
    """Riemann sum of ``<gamma, g>^{-1} int W_A(f, g)(z) pi_A(z) gamma dz`` over the grid."""
    A = _require_si(A)
    c = gamma.inner(g)
    if abs(c) <= 1e-8:
        raise ValueError("<g, gamma> vanishes: the inversion formula does not apply")
    hg = deformation_window(A, gamma)
    # the fast path carries the same global constant as the atoms
    W = wigner_A_grid(A, f, g, method="fast")
    pts = W.points().reshape(-1, 2)
    w = W.values.reshape(-1)
    out = np.zeros(f.N, dtype=complex)
    for s in range(0, len(w), chunk):
        out += w[s:s + chunk] @ _atom_rows(A, hg, pts[s:s + chunk])
    return SampledSignal(out * W.dx * W.dxi / c, f.dx)
