"""Factorization of symplectic matrices and sampled metaplectic operators.

Every symplectic matrix is written as a product of the projections of three
generators::

    fourier    -> [[0, I], [-I, 0]]
    linear(M)  -> [[M^-1, 0], [0, M^T]]       T_M f(x) = |det M|^1/2 f(Mx)
    chirp(Q)   -> [[I, 0], [Q, I]]            p_Q f(x) = exp(i pi Qx.x) f(x)

and the resulting chain is applied either to generalized Gaussians (see
:mod:`mtfa.gaussian`) or to data sampled on centered grids
``x_j = (j - N/2) h``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .symplectic import (
    SINGULAR_EPS,
    BlockSymplectic,
    is_invertible,
    omega,
    rotation,
)

__all__ = [
    "Generator",
    "Factorization",
    "SampledSignal",
    "TimeFrequencyGrid",
    "SpillWarning",
    "factorize",
    "apply_discrete",
    "apply_generator_discrete",
    "phase_blind_compare",
    "centered_dft",
    "centered_idft",
    "grid_coords",
    "resample_axis",
    "linear_resample",
    "ROTATION_CANDIDATES",
]


class SpillWarning(RuntimeWarning):
    """Energy left the finite grid during a sampled transform."""


# fixed, ordered; +-pi/2 first, then successive halvings
ROTATION_CANDIDATES = tuple(
    s * np.pi * k / 2**m
    for m in range(1, 7)
    for k in range(1, 2**m, 2)
    for s in (1, -1)
)


@dataclass(frozen=True)
class Generator:
    kind: str
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("fourier", "linear", "chirp"):
            raise ValueError(f"unknown generator {self.kind!r}")
        if self.kind == "fourier":
            object.__setattr__(self, "matrix", None)
            return
        M = np.atleast_2d(np.asarray(self.matrix, dtype=float)).copy()
        if self.kind == "chirp":
            if np.max(np.abs(M - M.T)) > 1e-8 * max(1.0, np.max(np.abs(M))):
                raise ValueError("chirp generator needs a symmetric matrix")
            M = (M + M.T) / 2
        elif not is_invertible(M):
            raise ValueError("linear generator needs an invertible matrix")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    def projection(self, n: int) -> np.ndarray:
        I = np.eye(n)
        Z = np.zeros((n, n))
        if self.kind == "fourier":
            return omega(n)
        if self.kind == "linear":
            return np.block([[np.linalg.inv(self.matrix), Z], [Z, self.matrix.T]])
        return np.block([[I, Z], [self.matrix, I]])

    def inverse(self, n: int) -> list["Generator"]:
        if self.kind == "fourier":
            # F^{-1} f = F(f(-.))
            return [Generator("linear", -np.eye(n)), Generator("fourier")]
        if self.kind == "linear":
            return [Generator("linear", np.linalg.inv(self.matrix))]
        return [Generator("chirp", -self.matrix)]

    def __repr__(self):
        if self.kind == "fourier":
            return "fourier"
        return f"{self.kind}({np.array2string(self.matrix, precision=4)})"


@dataclass(frozen=True)
class Factorization:
    """Generators in application order: ``generators[0]`` acts first."""

    generators: tuple
    source: BlockSymplectic
    residual: float

    @property
    def n(self) -> int:
        return self.source.n

    def projection(self) -> np.ndarray:
        return _product(self.generators, self.n)

    def inverse(self) -> "Factorization":
        gens = []
        for g in reversed(self.generators):
            gens.extend(g.inverse(self.n))
        gens = tuple(_simplify(gens, self.n))
        src = self.source.inverse()
        return Factorization(gens, src, float(np.max(np.abs(_product(gens, self.n) - src.matrix))))

    def stretch(self) -> float:
        """Largest spectral norm over the partial products (phase-space growth)."""
        return _stretch(self.generators, self.n)


def _product(gens, n):
    P = np.eye(2 * n)
    for g in gens:
        P = g.projection(n) @ P
    return P


def _stretch(gens, n):
    P = np.eye(2 * n)
    worst = 1.0
    for g in gens:
        P = g.projection(n) @ P
        worst = max(worst, np.linalg.norm(P, 2))
    return worst


def _simplify(gens, n, tol=1e-14):
    out = []
    for g in gens:
        if g.kind == "chirp" and np.max(np.abs(g.matrix)) <= tol:
            continue
        if g.kind == "linear" and np.max(np.abs(g.matrix - np.eye(n))) <= tol:
            continue
        out.append(g)
    return out


def _free_route(S: np.ndarray, n: int):
    A, B, C, D = S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]
    Binv = np.linalg.inv(B)
    P1 = Binv @ A
    P2 = D @ Binv
    return [
        Generator("chirp", (P1 + P1.T) / 2),
        Generator("fourier"),
        Generator("linear", Binv),
        Generator("chirp", (P2 + P2.T) / 2),
    ]


def _lower_route(S: np.ndarray, n: int):
    # B = 0: S = V_{C A^-1} D_{A^-1}
    A, C = S[:n, :n], S[n:, :n]
    Ainv = np.linalg.inv(A)
    P = C @ Ainv
    return [Generator("linear", Ainv), Generator("chirp", (P + P.T) / 2)]


def _rotation_route(S: np.ndarray, n: int, theta: float):
    Sp = S @ rotation(-theta, n).matrix
    if not is_invertible(Sp[:n, n:]):
        return None
    return _free_route(rotation(theta, n).matrix, n) + _free_route(Sp, n)


def factorize(S, balanced: bool = False) -> Factorization:
    """Write ``S`` as a chain of fourier / linear / chirp generators.

    The free case (``B`` invertible) uses
    ``[chirp(B^-1 A), fourier, linear(B^-1), chirp(D B^-1)]`` and ``B = 0``
    uses ``[linear(A^-1), chirp(C A^-1)]``. Otherwise ``S`` is split as
    ``(S R_-theta) R_theta`` with the fractional-Fourier rotation ``R_theta``
    taken from :data:`ROTATION_CANDIDATES`; among the admissible angles the
    one with the smallest intermediate phase-space stretch wins.

    With ``balanced=True`` the direct routes compete with the rotation
    routes on stretch as well; the sampled transforms use this mode because
    intermediate stretch is what pushes energy off a finite grid.
    """
    if not isinstance(S, BlockSymplectic):
        S = BlockSymplectic(S)
    n = S.n
    M = S.matrix
    scale = max(1.0, float(np.max(np.abs(M))))
    B = M[:n, n:]

    routes = []
    if np.max(np.abs(B)) <= SINGULAR_EPS * scale:
        routes.append(_lower_route(M, n))
    elif is_invertible(B):
        routes.append(_free_route(M, n))

    if not routes or balanced:
        for theta in ROTATION_CANDIDATES:
            r = _rotation_route(M, n, theta)
            if r is not None:
                routes.append(r)
    if not routes:
        raise ValueError("no rotation candidate makes the matrix free")

    routes = [_simplify(r, n) for r in routes]
    if balanced or len(routes) > 1:
        costs = [_stretch(r, n) for r in routes]
        # earliest route wins unless another is clearly better
        best = int(np.argmin(costs))
        if costs[0] <= costs[best] * (1 + 1e-9):
            best = 0
        gens = routes[best]
    else:
        gens = routes[0]

    residual = float(np.max(np.abs(_product(gens, n) - M)))
    if residual > 1e-9 * scale**2:
        raise ArithmeticError(f"factorization residual {residual:.3e} too large")
    return Factorization(tuple(gens), S, residual)


# ----------------------------------------------------------------------------
# sampled data


def grid_coords(N: int, h: float) -> np.ndarray:
    """Centered grid ``(j - N/2) h``, ``j = 0..N-1``."""
    return (np.arange(N) - N // 2) * h


def _check_pow2(N):
    if N < 2 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two, got {N}")


@dataclass(frozen=True)
class SampledSignal:
    values: np.ndarray
    dx: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1:
            raise ValueError("SampledSignal holds 1-D data")
        _check_pow2(v.size)
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def N(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return grid_coords(self.N, self.dx)

    @property
    def spacing(self):
        return (self.dx,)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.dx))

    def inner(self, other: "SampledSignal") -> complex:
        """``<self, other>``, antilinear in the second slot."""
        return complex(np.vdot(other.values, self.values) * self.dx)

    def with_values(self, values, **meta) -> "SampledSignal":
        return SampledSignal(values, self.dx, {**self.meta, **meta})

    @classmethod
    def from_function(cls, fn, N: int = 256, dx: float = 1 / 16) -> "SampledSignal":
        return cls(fn(grid_coords(N, dx)), dx)

    @classmethod
    def from_gaussian(cls, G, N: int = 256, dx: float = 1 / 16) -> "SampledSignal":
        from .gaussian import evaluate_gaussian

        return cls(evaluate_gaussian(G, grid_coords(N, dx)), dx)


@dataclass(frozen=True)
class TimeFrequencyGrid:
    """Samples on an ``N x N`` phase-space grid.

    ``values[i, k]`` sits at ``(x_i, xi_k)`` with ``x_i = (i - N/2) dx`` and
    ``xi_k = (k - N/2) dxi``. ``meta`` carries the source projection and the
    accumulated spill (fraction of energy lost off-grid).
    """

    values: np.ndarray
    dx: float
    dxi: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("TimeFrequencyGrid holds square 2-D data")
        _check_pow2(v.shape[0])
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "dxi", float(self.dxi))

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def x(self) -> np.ndarray:
        return grid_coords(self.N, self.dx)

    @property
    def xi(self) -> np.ndarray:
        return grid_coords(self.N, self.dxi)

    @property
    def spacing(self):
        return (self.dx, self.dxi)

    @property
    def spill(self) -> float:
        return float(self.meta.get("spill", 0.0))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.dx * self.dxi))

    def inner(self, other: "TimeFrequencyGrid") -> complex:
        return complex(np.vdot(other.values, self.values) * self.dx * self.dxi)

    def with_values(self, values, **meta) -> "TimeFrequencyGrid":
        return TimeFrequencyGrid(values, self.dx, self.dxi, {**self.meta, **meta})

    def points(self) -> np.ndarray:
        X, XI = np.meshgrid(self.x, self.xi, indexing="ij")
        return np.stack([X, XI], axis=-1)


def centered_dft(v: np.ndarray, axes, h) -> np.ndarray:
    """``F[k] = h sum_j v[j] exp(-2 pi i (k-N/2)(j-N/2)/N)`` along ``axes``."""
    axes = tuple(np.atleast_1d(axes))
    out = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(v, axes=axes), axes=axes), axes=axes)
    for ax, hh in zip(axes, np.broadcast_to(h, len(axes))):
        out = out * hh
    return out


def centered_idft(v: np.ndarray, axes, h) -> np.ndarray:
    """Inverse of :func:`centered_dft` where ``h`` is the spacing of the *output*."""
    axes = tuple(np.atleast_1d(axes))
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(v, axes=axes), axes=axes), axes=axes)
    for ax, hh in zip(axes, np.broadcast_to(h, len(axes))):
        out = out / hh
    return out


def _trig_coeffs(rows: np.ndarray, h: float):
    """Coefficients of the trigonometric interpolant of each row.

    Returns ``(a, nu)`` with ``row(y) = sum_k a[:, k] exp(2 pi i nu[k] y)``;
    the Nyquist term is split symmetrically between ``+-1/(2h)``.
    """
    N = rows.shape[-1]
    a = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(rows, axes=-1), axis=-1), axes=-1) / N
    nu = (np.arange(N) - N // 2) / (N * h)
    a = np.concatenate([a, a[:, :1] / 2], axis=1)
    a[:, 0] /= 2
    nu = np.r_[nu, -nu[0]]
    return a, nu


def resample_axis(v: np.ndarray, axis: int, h: float, scale: float, offsets=0.0,
                  method: str = "fourier", order: int = 8) -> np.ndarray:
    """Evaluate ``v`` along ``axis`` at ``scale * x_j + offset``.

    ``offsets`` broadcasts over the remaining axes (one offset per line).
    Positions outside the grid extent evaluate to zero. ``method`` is
    ``"fourier"`` (band-limited trigonometric interpolation) or
    ``"lagrange"`` (local polynomial of the given order, compiled kernel).
    """
    v = np.asarray(v, dtype=complex)
    off = _line_offsets(offsets, v.shape, axis)
    v = np.moveaxis(v, axis, -1)
    shape = v.shape
    N = shape[-1]
    rows = v.reshape(-1, N)
    x = grid_coords(N, h)
    y = scale * x[None, :] + off[:, None]
    half = N * h / 2
    outside = (y < -half * (1 + 1e-12)) | (y > half * (1 - 1e-12))
    if method == "fourier":
        if scale == 1.0:
            # translation: phase ramp + inverse FFT, then swap the one-sided
            # Nyquist term for its symmetric cosine form
            a = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(rows, axes=-1), axis=-1), axes=-1) / N
            nu = (np.arange(N) - N // 2) / (N * h)
            c = a * np.exp(2j * np.pi * off[:, None] * nu[None, :])
            out = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(c, axes=-1), axis=-1), axes=-1) * N
            out += a[:, :1] * (np.cos(np.pi * y / h) - np.exp(-1j * np.pi * y / h))
        else:
            a, nu = _trig_coeffs(rows, h)
            if np.any(off != 0):
                a = a * np.exp(2j * np.pi * off[:, None] * nu[None, :])
            out = a @ np.exp(2j * np.pi * np.outer(nu, scale * x))
    elif method == "lagrange":
        out = kernels.lagrange_resample_rows(rows, (y - x[0]) / h, order)
    else:
        raise ValueError(f"unknown resampling method {method!r}")
    out[outside] = 0
    return np.moveaxis(out.reshape(shape), -1, axis)


def _line_offsets(offsets, shape, axis):
    """One offset per line along ``axis``; ``offsets`` broadcasts to ``shape``."""
    if np.ndim(offsets) == 0:
        R = int(np.prod(shape)) // shape[axis]
        return np.full(R, float(offsets))
    off = np.broadcast_to(np.asarray(offsets, dtype=float), shape)
    return np.moveaxis(off, axis, -1)[..., 0].reshape(-1)


def _quarter_turn(v: np.ndarray) -> np.ndarray:
    """``F(Qx)`` with ``Q = [[0, -1], [1, 0]]`` on a square centered grid (exact)."""
    N = v.shape[0]
    rev = (-np.arange(N)) % N
    return v[rev, :].T


def _reflect(v: np.ndarray, axis: int) -> np.ndarray:
    N = v.shape[axis]
    return np.take(v, (-np.arange(N)) % N, axis=axis)


def _rotate(v, h, phi, method, order):
    """``F(R_phi x)``, ``R_phi`` the counter-clockwise rotation by ``phi``."""
    k = int(np.round(phi / (np.pi / 2)))
    rest = phi - k * np.pi / 2
    for _ in range(k % 4):
        v = _quarter_turn(v)
    if abs(rest) < 1e-15:
        return v
    # R = Sx(-t) Sy(s) Sx(-t), Sx(a) = [[1, a], [0, 1]], Sy(b) = [[1, 0], [b, 1]]
    t, s = np.tan(rest / 2), np.sin(rest)
    x = grid_coords(v.shape[0], h)
    v = resample_axis(v, 0, h, 1.0, -t * x[None, :], method, order)
    v = resample_axis(v, 1, h, 1.0, s * x[:, None], method, order)
    v = resample_axis(v, 0, h, 1.0, -t * x[None, :], method, order)
    return v


def _orthogonal(v, h, U, method, order):
    if np.linalg.det(U) < 0:
        # U = U' diag(1, -1): rotate by U' first, then reflect axis 1
        Up = U @ np.diag([1.0, -1.0])
        v = _rotate(v, h, np.arctan2(Up[1, 0], Up[0, 0]), method, order)
        return _reflect(v, 1)
    return _rotate(v, h, np.arctan2(U[1, 0], U[0, 0]), method, order)


def linear_resample(v: np.ndarray, h: float, M, method: str = "fourier", order: int = 8) -> np.ndarray:
    """``|det M|^1/2 v(Mx)`` on the same (square, equally spaced) grid.

    In 2-D ``M = U diag(s) V^T`` is applied as rotation, axis scaling and
    rotation; rotations are quarter turns plus three shears, so every step
    is a one-dimensional resampling.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    det = abs(np.linalg.det(M))
    if v.ndim == 1:
        return np.sqrt(det) * resample_axis(v, 0, h, float(M[0, 0]), 0.0, method, order)
    if v.ndim != 2 or M.shape != (2, 2):
        raise ValueError("linear resampling supports 1-D data or 2-D data with a 2x2 matrix")
    U, s, Vt = np.linalg.svd(M)
    # v(U S V^T x): apply U first, then S, then V^T
    v = _orthogonal(v, h, U, method, order)
    for ax in (0, 1):
        if abs(s[ax] - 1.0) > 1e-15:
            v = resample_axis(v, ax, h, float(s[ax]), 0.0, method, order)
    v = _orthogonal(v, h, Vt, method, order)
    return np.sqrt(det) * v


def _field(F):
    if isinstance(F, SampledSignal):
        return F.values, [F.dx]
    if isinstance(F, TimeFrequencyGrid):
        return F.values, [F.dx, F.dxi]
    raise TypeError("expected SampledSignal or TimeFrequencyGrid")


def _energy(v, h):
    return float(np.sum(np.abs(v) ** 2) * np.prod(h))


def apply_generator_discrete(gen: Generator, v: np.ndarray, h: list,
                             method: str = "fourier", order: int = 8):
    """Apply one generator to samples ``v`` with per-axis spacings ``h``.

    Returns ``(values, spacings, spill)``; ``spill`` is the fraction of
    energy lost by the step (only resampling can lose energy).
    """
    n = v.ndim
    if gen.kind == "fourier":
        out = centered_dft(v, tuple(range(n)), h)
        return out, [1.0 / (v.shape[a] * h[a]) for a in range(n)], 0.0
    if gen.kind == "chirp":
        Q = gen.matrix
        if Q.shape != (n, n):
            raise ValueError(f"chirp of size {Q.shape} on {n}-D data")
        xs = np.meshgrid(*[grid_coords(v.shape[a], h[a]) for a in range(n)], indexing="ij")
        quad = sum(Q[a, b] * xs[a] * xs[b] for a in range(n) for b in range(n))
        return v * np.exp(1j * np.pi * quad), list(h), 0.0
    if n == 2 and not np.isclose(h[0], h[1], rtol=1e-12):
        raise ValueError("2-D linear steps need equal spacing on both axes")
    e0 = _energy(v, h)
    out = linear_resample(v, h[0], gen.matrix, method, order)
    e1 = _energy(out, h)
    spill = max(0.0, 1.0 - e1 / e0) if e0 > 0 else 0.0
    return out, list(h), spill


def apply_discrete(fact: Factorization, F, method: str = "fourier", order: int = 8,
                   spill_threshold: float = 1e-6):
    """Apply a factorized metaplectic operator to sampled data.

    ``F`` is a :class:`SampledSignal` (for ``2 x 2`` projections) or a
    :class:`TimeFrequencyGrid` (for ``4 x 4`` projections). The output has the
    same type; Fourier steps map spacing ``h`` to ``1/(N h)``. The total
    spill is stored in ``meta["spill"]`` and a :class:`SpillWarning` is
    issued when it exceeds ``spill_threshold``.
    """
    v, h = _field(F)
    if fact.n != v.ndim:
        raise ValueError(f"{2 * fact.n}x{2 * fact.n} operator on {v.ndim}-D data")
    kept = 1.0 - float(F.meta.get("spill", 0.0))
    for gen in fact.generators:
        v, h, sp = apply_generator_discrete(gen, v, h, method, order)
        kept *= 1.0 - sp
    spill = 1.0 - kept
    meta = {**F.meta, "spill": spill}
    if spill > spill_threshold:
        meta["truncated"] = True
        warnings.warn(f"{spill:.2e} of the energy left the grid", SpillWarning, stacklevel=2)
    if v.ndim == 1:
        return SampledSignal(v, h[0], meta)
    return TimeFrequencyGrid(v, h[0], h[1], meta)


def phase_blind_compare(X, Y):
    """Best unimodular ``alpha`` with ``X ~ alpha Y`` and the relative residual.

    ``alpha = <X, Y>/|<X, Y>|`` and ``residual = |X - alpha Y| / |Y|``.
    """
    X = np.asarray(getattr(X, "values", X), dtype=complex)
    Y = np.asarray(getattr(Y, "values", Y), dtype=complex)
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch {X.shape} vs {Y.shape}")
    ny = np.linalg.norm(Y)
    if ny == 0 or np.linalg.norm(X) == 0:
        raise ValueError("phase_blind_compare needs nonzero inputs")
    ip = np.vdot(Y, X)
    alpha = ip / abs(ip) if ip != 0 else 1.0 + 0j
    return complex(alpha), float(np.linalg.norm(X - alpha * Y) / ny)
