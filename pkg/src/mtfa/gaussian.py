"""Closed-form metaplectic calculus on generalized Gaussians.

A generalized Gaussian on ``R^n`` is ``c * exp(i pi Q x.x + 2 pi i p.x)`` with
``Q`` complex symmetric and ``Im Q`` positive definite. The three metaplectic
generators map this class to itself, which makes it an exact reference for
the sampled transforms.

Phases follow the principal-branch convention: the Fourier step multiplies
by ``prod_k lambda_k^{-1/2}`` over the eigenvalues of ``-iQ`` (all in the
right half plane), i.e. the factors ``i^{-d/2}`` of the generators are
dropped. Comparisons against other paths are therefore phase-blind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeneralizedGaussian",
    "ChirpFunction",
    "standard_gaussian",
    "apply_generator_gaussian",
    "apply_factorization_gaussian",
    "inner_product_gaussian",
    "tensor_gaussian",
    "wigner_A_gaussian",
    "evaluate_gaussian",
    "tf_shift_gaussian",
]

COND_LIMIT = 1e12


@dataclass(frozen=True)
class GeneralizedGaussian:
    c: complex
    Q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        p = np.atleast_1d(np.asarray(self.p, dtype=complex))
        if Q.shape != (p.size, p.size):
            raise ValueError(f"Q has shape {Q.shape} but p has length {p.size}")
        if np.max(np.abs(Q - Q.T)) > 1e-12 * max(1.0, np.max(np.abs(Q))):
            raise ValueError("Q must be symmetric")
        Q = (Q + Q.T) / 2
        ev = np.linalg.eigvalsh(Q.imag)
        if ev[0] <= 0:
            raise ValueError("Im Q must be positive definite")
        if ev[-1] / ev[0] > COND_LIMIT:
            raise ValueError(f"Im Q is too ill-conditioned ({ev[-1] / ev[0]:.2e})")
        Q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def n(self) -> int:
        return self.p.size

    def __call__(self, points):
        return evaluate_gaussian(self, points)

    def scaled(self, factor) -> "GeneralizedGaussian":
        return GeneralizedGaussian(self.c * factor, self.Q, self.p)

    def conj(self) -> "GeneralizedGaussian":
        return GeneralizedGaussian(np.conj(self.c), -np.conj(self.Q), -np.conj(self.p))

    def norm(self) -> float:
        return float(np.sqrt(inner_product_gaussian(self, self).real))


@dataclass(frozen=True)
class ChirpFunction:
    """``Phi_M(z) = exp(i pi M z.z)`` for a real symmetric ``M``."""

    M: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        if np.max(np.abs(M - M.T)) > 1e-10 * max(1.0, np.max(np.abs(M))):
            raise ValueError("chirp matrix must be symmetric")
        object.__setattr__(self, "M", (M + M.T) / 2)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return np.exp(1j * np.pi * np.einsum("...i,ij,...j->...", z, self.M, z))


def standard_gaussian(n: int = 1) -> GeneralizedGaussian:
    """``2^{n/4} exp(-pi |x|^2)``, the unit-norm Gaussian."""
    return GeneralizedGaussian(2 ** (n / 4), 1j * np.eye(n), np.zeros(n))


def _sqrt_det(A: np.ndarray) -> complex:
    # analytic branch on {Re A > 0}: every eigenvalue has positive real part
    return complex(np.prod(np.sqrt(np.linalg.eigvals(A).astype(complex))))


def _gauss_integral(Q: np.ndarray, p: np.ndarray) -> complex:
    """``int exp(i pi Q x.x + 2 pi i p.x) dx`` for ``Im Q > 0``."""
    Qi = np.linalg.inv(Q)
    return np.exp(-1j * np.pi * p @ Qi @ p) / _sqrt_det(-1j * Q)


def apply_generator_gaussian(gen, G: GeneralizedGaussian) -> GeneralizedGaussian:
    """Apply one generator, given as a ``Generator`` or a ``(kind, matrix)`` pair."""
    kind, mat = (gen.kind, gen.matrix) if hasattr(gen, "kind") else gen
    if kind == "chirp":
        Q0 = np.atleast_2d(np.asarray(mat, dtype=float))
        return GeneralizedGaussian(G.c, G.Q + Q0, G.p)
    if kind == "linear":
        M = np.atleast_2d(np.asarray(mat, dtype=float))
        det = np.linalg.det(M)
        if abs(det) < 1e-300:
            raise ValueError("linear generator needs an invertible matrix")
        return GeneralizedGaussian(G.c * np.sqrt(abs(det)), M.T @ G.Q @ M, M.T @ G.p)
    if kind == "fourier":
        Qi = np.linalg.inv(G.Q)
        c = G.c * np.exp(-1j * np.pi * G.p @ Qi @ G.p) / _sqrt_det(-1j * G.Q)
        return GeneralizedGaussian(c, -Qi, Qi @ G.p)
    raise ValueError(f"unknown generator {kind!r}")


def apply_factorization_gaussian(fact, G: GeneralizedGaussian) -> GeneralizedGaussian:
    for gen in fact.generators:
        G = apply_generator_gaussian(gen, G)
    return G


def inner_product_gaussian(G1: GeneralizedGaussian, G2: GeneralizedGaussian) -> complex:
    """Exact ``int G1 conj(G2)``."""
    if G1.n != G2.n:
        raise ValueError("dimension mismatch")
    return G1.c * np.conj(G2.c) * _gauss_integral(G1.Q - np.conj(G2.Q), G1.p - np.conj(G2.p))


def tensor_gaussian(G1: GeneralizedGaussian, conj_flag: bool, G2: GeneralizedGaussian) -> GeneralizedGaussian:
    """``G1 x G2`` or, with ``conj_flag``, ``G1 x conj(G2)``."""
    if conj_flag:
        G2 = G2.conj()
    n1, n2 = G1.n, G2.n
    Q = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    Q[:n1, :n1] = G1.Q
    Q[n1:, n1:] = G2.Q
    return GeneralizedGaussian(G1.c * G2.c, Q, np.r_[G1.p, G2.p])


def wigner_A_gaussian(A, G1: GeneralizedGaussian, G2: GeneralizedGaussian, fact=None) -> GeneralizedGaussian:
    """``W_A(G1, G2)`` in closed form, exact up to one unimodular constant."""
    from .metaplectic import factorize

    if fact is None:
        fact = factorize(A)
    return apply_factorization_gaussian(fact, tensor_gaussian(G1, True, G2))


def evaluate_gaussian(G: GeneralizedGaussian, points) -> np.ndarray:
    """Evaluate at an array of points with trailing dimension ``n`` (or scalars if ``n == 1``)."""
    pts = np.asarray(points, dtype=float)
    if G.n == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
        pts = pts[..., None]
    if pts.shape[-1] != G.n:
        raise ValueError(f"points have trailing dimension {pts.shape[-1]}, expected {G.n}")
    quad = np.einsum("...i,ij,...j->...", pts, G.Q, pts)
    lin = pts @ G.p
    return G.c * np.exp(1j * np.pi * quad + 2j * np.pi * lin)


def tf_shift_gaussian(G: GeneralizedGaussian, x0, xi0) -> GeneralizedGaussian:
    """``pi(x0, xi0) G (t) = exp(2 pi i xi0.t) G(t - x0)``."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    xi0 = np.atleast_1d(np.asarray(xi0, dtype=float))
    # Q(t-x0).(t-x0) = Qt.t - 2 Qx0.t + Qx0.x0
    c = G.c * np.exp(1j * np.pi * x0 @ G.Q @ x0 - 2j * np.pi * G.p @ x0)
    p = G.p - G.Q @ x0 + xi0
    return GeneralizedGaussian(c, G.Q, p)
