"""Real symplectic matrices: constructors, block access and classification.

Matrices act on phase space ordered as ``(x_1, ..., x_n, xi_1, ..., xi_n)``.
For the ``4d x 4d`` projections of metaplectic Wigner distributions the
ordering is ``(x_1, x_2, xi_1, xi_2)`` with each entry a ``d``-vector, so the
sixteen ``d x d`` blocks ``A_ij`` follow the usual row/column layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SymplecticError",
    "BlockSymplectic",
    "DerivedBlocks",
    "ClassificationReport",
    "SINGULAR_EPS",
    "omega",
    "symplectic_check",
    "symplectic_residual",
    "make_named",
    "make_composite",
    "tensor_embed",
    "rotation",
    "derived_blocks",
    "is_covariant",
    "is_shift_invertible",
    "is_free",
    "is_invertible",
    "classify",
    "covariant_template",
    "random_symplectic",
    "conjugate_projection",
    "M_HALF",
]

#: relative singular-value threshold used for every rank decision
SINGULAR_EPS = 1e-10


class SymplecticError(ValueError):
    """Raised when a matrix violates the symplectic invariant or has a bad shape."""


def omega(n: int) -> np.ndarray:
    """Standard symplectic form ``[[0, I], [-I, 0]]`` of size ``2n``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SymplecticError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise SymplecticError(f"symplectic matrices have even size, got {M.shape[0]}")
    return M


def symplectic_residual(M) -> float:
    """Max-norm of ``M^T J M - J``."""
    M = _as_square(M)
    J = omega(M.shape[0] // 2)
    return float(np.max(np.abs(M.T @ J @ M - J)))


def symplectic_check(M, tol: float = 1e-12) -> bool:
    """True iff ``max|M^T J M - J| <= tol``.

    Raises :class:`SymplecticError` for non-square or odd-sized input.
    """
    return symplectic_residual(M) <= tol


def is_invertible(M, eps: float = SINGULAR_EPS) -> bool:
    """Scale-free rank test: smallest singular value > ``eps`` times the largest."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return False
    return bool(s[-1] > eps * s[0])


@dataclass(frozen=True)
class BlockSymplectic:
    """A validated real symplectic matrix of size ``2n x 2n``.

    Parameters
    ----------
    matrix : array_like
        The matrix. Symplecticity is checked at a tolerance that scales with
        ``|M|^2`` so that large but exact matrices are not rejected because of
        round-off.
    check : bool
        Set to False only for internal construction of already-verified data.
    """

    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        M = _as_square(self.matrix).copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        if self.check:
            scale = max(1.0, float(np.max(np.abs(M))) ** 2)
            res = symplectic_residual(M)
            if res > 1e-9 * scale:
                raise SymplecticError(f"matrix is not symplectic (residual {res:.3e})")

    @property
    def n(self) -> int:
        """Half the size: the phase-space dimension is ``2n``."""
        return self.matrix.shape[0] // 2

    def abcd(self):
        """The four ``n x n`` blocks ``(A, B, C, D)``."""
        n = self.n
        M = self.matrix
        return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]

    def block(self, i: int, j: int) -> np.ndarray:
        """Block ``A_ij`` (1-based) of a ``4d x 4d`` matrix."""
        if self.n % 2:
            raise SymplecticError("4x4 block access needs a 4d x 4d matrix")
        d = self.n // 2
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise IndexError("block indices run from 1 to 4")
        return self.matrix[(i - 1) * d : i * d, (j - 1) * d : j * d]

    def __matmul__(self, other: "BlockSymplectic") -> "BlockSymplectic":
        return BlockSymplectic(self.matrix @ other.matrix)

    def inverse(self) -> "BlockSymplectic":
        # S^{-1} = -J S^T J
        J = omega(self.n)
        return BlockSymplectic(-J @ self.matrix.T @ J)

    def to_json(self, d: int | None = None) -> dict:
        if d is None:
            d = self.n // 2 if self.n % 2 == 0 else self.n
        return {"d": int(d), "rows": self.matrix.tolist()}


@dataclass(frozen=True)
class DerivedBlocks:
    E: np.ndarray
    B: np.ndarray | None
    M: np.ndarray
    G: np.ndarray | None


@dataclass(frozen=True)
class ClassificationReport:
    symplectic: bool
    covariant: bool | None
    shift_invertible: bool | None
    free: bool | None
    residual: float
    derived: DerivedBlocks | None = None

    def to_dict(self) -> dict:
        out = {
            "symplectic": self.symplectic,
            "covariant": self.covariant,
            "shift_invertible": self.shift_invertible,
            "free": self.free,
            "residual": self.residual,
        }
        if self.derived is not None:
            dv = self.derived
            out["derived"] = {
                "E": dv.E.tolist(),
                "B": None if dv.B is None else dv.B.tolist(),
                "M": dv.M.tolist(),
                "G": None if dv.G is None else dv.G.tolist(),
            }
        return out


def _blocks4(rows, d):
    return BlockSymplectic(np.block([[np.asarray(b) * np.eye(d) for b in r] for r in rows]))


def make_named(kind: str, d: int = 1, tau: float = 0.5, hbar: float | None = None) -> BlockSymplectic:
    """Projections of the classical distributions as ``4d x 4d`` matrices.

    ``kind`` is one of ``"stft"``, ``"tau"`` (uses ``tau``), ``"wigner"``
    (``tau = 1/2``), ``"rihaczek"`` (``tau = 0``) or ``"hbar"`` (uses ``hbar``).
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    if kind == "stft":
        return _blocks4(
            [[1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 0, -1], [-1, 0, 0, 0]], d
        )
    if kind in ("tau", "wigner", "rihaczek"):
        t = {"wigner": 0.5, "rihaczek": 0.0}.get(kind, float(tau))
        return _blocks4(
            [[1 - t, t, 0, 0], [0, 0, t, -(1 - t)], [0, 0, 1, 1], [-1, 1, 0, 0]], d
        )
    if kind == "hbar":
        if hbar is None or not hbar > 0:
            raise ValueError("hbar must be a positive real")
        c = 2 * np.pi * hbar
        k = -1.0 / (4 * np.pi * hbar)
        return _blocks4([[1, -1, 0, 0], [0, 0, c, c], [0, 0, 0.5, -0.5], [k, k, 0, 0]], d)
    raise ValueError(f"unknown distribution kind {kind!r}")


def _check_same_dim(*mats: BlockSymplectic) -> int:
    ns = {m.n for m in mats}
    if len(ns) != 1:
        raise SymplecticError(f"mismatched dimensions {sorted(ns)}")
    return ns.pop()


def make_composite(S: BlockSymplectic, S1: BlockSymplectic, S2: BlockSymplectic) -> BlockSymplectic:
    """Projection of ``(id x S) T_{M_1/2} (S1 f x conj(S2 g))``, assembled blockwise."""
    d = _check_same_dim(S, S1, S2)
    A, B, C, D = S.abcd()
    A1, B1, C1, D1 = S1.abcd()
    A2, B2, C2, D2 = S2.abcd()
    h = 0.5
    M = np.block(
        [
            [h * A1, h * A2, h * B1, -h * B2],
            [A @ A1 + h * B @ C1, -A @ A2 + h * B @ C2, A @ B1 + h * B @ D1, A @ B2 - h * B @ D2],
            [C1, -C2, D1, D2],
            [C @ A1 + h * D @ C1, -C @ A2 + h * D @ C2, C @ B1 + h * D @ D1, C @ B2 - h * D @ D2],
        ]
    )
    assert M.shape == (4 * d, 4 * d)
    return BlockSymplectic(M)


def tensor_embed(S: BlockSymplectic) -> BlockSymplectic:
    """Projection of ``id x S`` in coordinates ``(x1, x2, xi1, xi2)``."""
    if not isinstance(S, BlockSymplectic):
        S = BlockSymplectic(S)
    d = S.n
    A, B, C, D = S.abcd()
    I = np.eye(d)
    Z = np.zeros((d, d))
    return BlockSymplectic(
        np.block([[I, Z, Z, Z], [Z, A, Z, B], [Z, Z, I, Z], [Z, C, Z, D]])
    )


def rotation(theta, n: int = 1) -> BlockSymplectic:
    """Projection of the fractional Fourier transform of angle ``theta`` on every axis."""
    c, s = np.cos(theta), np.sin(theta)
    I = np.eye(n)
    return BlockSymplectic(np.block([[c * I, s * I], [-s * I, c * I]]), check=False)


def conjugate_projection(S: BlockSymplectic) -> BlockSymplectic:
    """Projection of ``f -> conj(S conj(f))``: ``diag(I,-I) S diag(I,-I)``."""
    n = S.n
    L = np.diag(np.r_[np.ones(n), -np.ones(n)])
    return BlockSymplectic(L @ S.matrix @ L, check=False)


# T_{M_1/2} f(x, t) = f(x + t/2, x - t/2) at d = 1
M_HALF = np.array([[1.0, 0.5], [1.0, -0.5]])


def _as_bs(A) -> BlockSymplectic:
    return A if isinstance(A, BlockSymplectic) else BlockSymplectic(A)


def _e_block(A: BlockSymplectic) -> np.ndarray:
    b = A.block
    return np.block([[b(1, 1), b(1, 3)], [b(2, 1), b(2, 3)]])


def derived_blocks(A) -> DerivedBlocks:
    """``E_A``, ``B_A`` (if covariant), ``M_A`` and ``G_A`` (if shift-invertible)."""
    A = _as_bs(A)
    b = A.block
    d = A.n // 2
    I = np.eye(d)
    E = _e_block(A)
    M = np.block(
        [
            [b(1, 1).T @ b(3, 1) + b(2, 1).T @ b(4, 1), b(1, 1).T @ b(3, 3) + b(2, 1).T @ b(4, 3)],
            [
                b(1, 3).T @ b(3, 1) + b(2, 3).T @ b(4, 1) + I,
                b(1, 3).T @ b(3, 3) + b(2, 3).T @ b(4, 3),
            ],
        ]
    )
    BA = None
    if is_covariant(A):
        BA = np.block([[b(1, 3), I / 2 - b(1, 1)], [I / 2 - b(1, 1).T, -b(2, 1)]])
    G = None
    if is_invertible(E):
        swap = np.block([[np.zeros((d, d)), I], [I, np.zeros((d, d))]])
        G = swap @ np.linalg.solve(E, np.block([[b(1, 2), b(1, 4)], [b(2, 2), b(2, 4)]]))
    return DerivedBlocks(E=E, B=BA, M=M, G=G)


def is_covariant(A, tol: float = 1e-10) -> bool:
    """Entrywise match with the covariant block template."""
    A = _as_bs(A)
    b = A.block
    d = A.n // 2
    I = np.eye(d)
    Z = np.zeros((d, d))
    A11, A13, A21 = b(1, 1), b(1, 3), b(2, 1)
    if np.max(np.abs(A13 - A13.T)) > tol or np.max(np.abs(A21 - A21.T)) > tol:
        return False
    template = np.block(
        [
            [A11, I - A11, A13, A13],
            [A21, -A21, I - A11.T, -A11.T],
            [Z, Z, I, I],
            [-I, I, Z, Z],
        ]
    )
    return bool(np.max(np.abs(A.matrix - template)) <= tol)


def is_shift_invertible(A, eps: float = SINGULAR_EPS) -> bool:
    return is_invertible(_e_block(_as_bs(A)), eps)


def is_free(S, eps: float = SINGULAR_EPS) -> bool:
    """True iff the upper-right block ``B`` is invertible."""
    S = _as_bs(S)
    return is_invertible(S.abcd()[1], eps)


def classify(M, d: int | None = None) -> ClassificationReport:
    """Classify a raw matrix; non-symplectic input is reported, not rejected.

    A matrix of size ``4d`` is treated as a Wigner-distribution projection
    (covariance and shift-invertibility are reported); a matrix of size
    ``2d`` as a single-signal operator (freeness is reported). If ``d`` is
    omitted, sizes divisible by 4 are treated as ``4d``.
    """
    M = _as_square(M)
    size = M.shape[0]
    if d is None:
        d = size // 4 if size % 4 == 0 else size // 2
    res = symplectic_residual(M)
    ok = res <= 1e-9 * max(1.0, float(np.max(np.abs(M))) ** 2)
    if size == 4 * d:
        if not ok:
            return ClassificationReport(False, False, False, None, res)
        A = BlockSymplectic(M, check=False)
        return ClassificationReport(
            True, is_covariant(A), is_shift_invertible(A), None, res, derived_blocks(A)
        )
    if size == 2 * d:
        free = is_free(BlockSymplectic(M, check=False)) if ok else False
        return ClassificationReport(ok, None, None, free, res)
    raise SymplecticError(f"size {size} is neither 2d nor 4d for d={d}")


def covariant_template(A11, A13, A21) -> BlockSymplectic:
    """Build the covariant projection from its free blocks (``A13``, ``A21`` symmetric)."""
    A11, A13, A21 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (A11, A13, A21))
    d = A11.shape[0]
    I = np.eye(d)
    Z = np.zeros((d, d))
    return BlockSymplectic(
        np.block(
            [
                [A11, I - A11, A13, A13],
                [A21, -A21, I - A11.T, -A11.T],
                [Z, Z, I, I],
                [-I, I, Z, Z],
            ]
        )
    )


def random_symplectic(n: int, rng=None, scale: float = 1.0) -> BlockSymplectic:
    """Random ``2n x 2n`` symplectic matrix ``V_P D_L U``.

    ``U`` is orthosymplectic (from a Haar-random unitary), ``L`` has
    log-singular-values of size about ``scale`` and ``P`` is a symmetric
    shear with entries of size about ``scale``. ``scale=0`` gives a pure
    phase-space rotation.
    """
    rng = np.random.default_rng(rng)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    X, Y = Q.real, Q.imag
    U = np.block([[X, -Y], [Y, X]])
    O1, _ = np.linalg.qr(rng.normal(size=(n, n)))
    O2, _ = np.linalg.qr(rng.normal(size=(n, n)))
    L = O1 @ np.diag(np.exp(scale * rng.uniform(-0.5, 0.5, n))) @ O2
    P = rng.normal(size=(n, n)) * scale * 0.5
    P = (P + P.T) / 2
    I = np.eye(n)
    Zn = np.zeros((n, n))
    D = np.block([[L, Zn], [Zn, np.linalg.inv(L).T]])
    V = np.block([[I, Zn], [P, I]])
    return BlockSymplectic(V @ D @ U)
