"""Mixed norms, modulation norms and norm-equivalence experiments on grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import named_distribution, stft_grid, wigner_A_grid
from .metaplectic import SampledSignal, TimeFrequencyGrid, centered_dft
from .symplectic import BlockSymplectic, derived_blocks, is_shift_invertible

__all__ = [
    "MixedNormSpec",
    "Weight",
    "mixed_norm",
    "lp_norm",
    "mod_norm",
    "test_family",
    "equivalence_ratio",
    "equivalence_ratios",
    "chirp_family",
    "Family",
    "rihaczek_identity_check",
    "chirp_sweep",
    "FAMILY_VERSION",
    "DEFAULT_SWEEP",
]

FAMILY_VERSION = "v1"


def _exponent(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "oo"):
            return np.inf
        v = float(v)
    v = float(v)
    if not v > 0:
        raise ValueError(f"exponent must be positive or inf, got {v}")
    return v


@dataclass(frozen=True)
class MixedNormSpec:
    """Exponents ``p, q`` in ``(0, inf]`` and weight exponent ``s >= 0``."""

    p: float = 2.0
    q: float = 2.0
    s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", _exponent(self.p))
        object.__setattr__(self, "q", _exponent(self.q))
        if not self.s >= 0:
            raise ValueError("weight exponent s must be non-negative")

    @property
    def weight(self) -> "Weight":
        return Weight(self.s)

    def to_dict(self) -> dict:
        enc = lambda v: "inf" if np.isinf(v) else v  # noqa: E731
        return {"p": enc(self.p), "q": enc(self.q), "s": self.s}


@dataclass(frozen=True)
class Weight:
    """Polynomial weight ``v_s(z) = (1 + |z|^2)^{s/2}``."""

    s: float = 0.0

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return (1.0 + np.sum(z**2, axis=-1)) ** (self.s / 2)

    def compatibility(self, E, points) -> tuple[float, float]:
        """Extremes of ``v(E z) / v(z)`` over ``points``."""
        r = self(np.asarray(points) @ np.asarray(E).T) / self(points)
        return float(r.min()), float(r.max())


def _lp(v: np.ndarray, p: float, h: float, axis) -> np.ndarray:
    a = np.abs(v)
    if np.isinf(p):
        return a.max(axis=axis)
    return (np.sum(a**p, axis=axis) * h) ** (1.0 / p)


def mixed_norm(grid: TimeFrequencyGrid, spec: MixedNormSpec) -> float:
    """Riemann-sum ``L^{p,q}_m`` norm: ``l^p`` over ``x`` per frequency row, then ``l^q`` over ``xi``."""
    v = grid.values
    if spec.s:
        v = v * spec.weight(grid.points())
    inner = _lp(v, spec.p, grid.dx, axis=0)  # values are indexed [x, xi]
    return float(_lp(inner, spec.q, grid.dxi, axis=0))


def lp_norm(f: SampledSignal, p: float) -> float:
    return float(_lp(f.values, _exponent(p), f.dx, axis=0))


def mod_norm(f: SampledSignal, g: SampledSignal, spec: MixedNormSpec) -> float:
    """``||V_g f||_{L^{p,q}_m}``."""
    if not np.any(g.values):
        raise ValueError("zero window")
    return mixed_norm(stft_grid(f, g), spec)


def test_family(N: int = 256, dx: float = 1 / 16) -> dict[str, SampledSignal]:
    """Fixed comparison family of eight unit-norm signals (Gaussian variants and two-bump pairs)."""
    fam = Family()

    def add(name, fn):
        s = SampledSignal.from_function(fn, N, dx)
        fam[name] = s.with_values(s.values / s.norm())

    add("gauss", lambda t: np.exp(-np.pi * t**2))
    add("gauss_wide", lambda t: np.exp(-np.pi * t**2 / 2))
    add("gauss_narrow", lambda t: np.exp(-2 * np.pi * t**2))
    add("gauss_shifted", lambda t: np.exp(-np.pi * (t - 1) ** 2 + 2j * np.pi * 0.5 * t))
    add("chirp_0.5", lambda t: np.exp(-np.pi * t**2 + 1j * np.pi * 0.5 * t**2))
    add("chirp_1", lambda t: np.exp(-np.pi * t**2 + 1j * np.pi * t**2))
    add("two_bump", lambda t: np.exp(-np.pi * (t - 1.5) ** 2) + np.exp(-np.pi * (t + 1.5) ** 2))
    add("two_bump_mod", lambda t: np.exp(-np.pi * (t - 1) ** 2) + np.exp(-np.pi * (t + 1) ** 2 + 2j * np.pi * t))
    return fam


def equivalence_ratios(A, g: SampledSignal, specs, family: dict | None = None,
                       method: str = "auto") -> list[dict]:
    """:func:`equivalence_ratio` for several specs, computing each ``W_A`` grid once."""
    A = A if isinstance(A, BlockSymplectic) else BlockSymplectic(A)
    if not is_shift_invertible(A):
        raise ValueError("equivalence_ratio needs a shift-invertible A")
    dv = derived_blocks(A)
    probe = stft_grid(g, g).points().reshape(-1, 2)
    checked = []
    for spec in specs:
        if spec.p != spec.q and np.max(np.abs(dv.E[1:, :1])) > 1e-12:
            raise ValueError("p != q needs an upper block triangular E_A")
        wlo, whi = spec.weight.compatibility(dv.E, probe)
        if wlo < 0.1 or whi > 10:
            raise ValueError(f"weight is not compatible with E_A on the grid (ratio range [{wlo:.3g}, {whi:.3g}])")
        checked.append((spec, (wlo, whi)))
    if family is None:
        family = test_family(g.N, g.dx)
    ratios = [{} for _ in specs]
    for name, f in family.items():
        W = wigner_A_grid(A, f, g, method=method)
        V = stft_grid(f, g)
        for k, (spec, _) in enumerate(checked):
            ratios[k][name] = mixed_norm(W, spec) / mixed_norm(V, spec)
    out = []
    for (spec, compat), r in zip(checked, ratios):
        vals = np.array(list(r.values()))
        out.append({
            "min": float(vals.min()),
            "max": float(vals.max()),
            "ratios": r,
            "weight_compatibility": compat,
            "family": getattr(family, "descriptor", FAMILY_VERSION),
            "spec": spec.to_dict(),
            "N": g.N,
        })
    return out


def equivalence_ratio(A, g: SampledSignal, spec: MixedNormSpec, family: dict | None = None,
                      method: str = "auto") -> dict:
    """Ratios ``||W_A(f, g)||_{L^{p,q}_m} / ||f||_{M^{p,q}_m}`` over a test family.

    Returns a dictionary with ``min``, ``max``, per-signal ``ratios`` and the
    checked preconditions. Precondition failures raise ``ValueError``: ``A``
    must be shift-invertible, the weight must satisfy ``m(E z) / m(z)`` in
    ``[1/10, 10]`` on the grid and ``p != q`` needs ``E_A`` upper block
    triangular.
    """
    return equivalence_ratios(A, g, [spec], family, method)[0]


def rihaczek_identity_check(f: SampledSignal, g: SampledSignal, spec: MixedNormSpec) -> float:
    """Relative gap between ``||W_0(f, g)||_{L^{p,q}}`` and ``||f||_p ||g^||_q``."""
    if spec.s != 0:
        raise ValueError("the Rihaczek identity is unweighted")
    R = named_distribution("rihaczek", f, g)
    lhs = mixed_norm(R, spec)
    gh = SampledSignal(centered_dft(g.values, 0, g.dx), 1.0 / (g.N * g.dx))
    rhs = lp_norm(f, spec.p) * lp_norm(gh, spec.q)
    return float(abs(lhs - rhs) / rhs)


class Family(dict):
    """Named signals plus a descriptor string for reports."""

    descriptor = FAMILY_VERSION


def chirp_family(rates, N: int = 1024, dx: float = 1 / 32, sigma: float = 5.0) -> tuple[Family, SampledSignal]:
    """Chirped Gaussians ``exp(-pi t^2 / sigma^2 + i pi c t^2)`` and their common window."""
    fam = Family()
    fam.descriptor = f"chirp sigma={sigma} rates={[float(c) for c in rates]}"
    for c in rates:
        fam[f"chirp_{c:g}"] = SampledSignal.from_function(
            lambda t, c=c: np.exp(-np.pi * t**2 / sigma**2 + 1j * np.pi * c * t**2), N, dx)
    g = SampledSignal.from_function(lambda t: np.exp(-np.pi * t**2 / sigma**2), N, dx)
    return fam, g


def chirp_sweep(rates, spec: MixedNormSpec | None = None, N: int = 1024, dx: float = 1 / 32,
                sigma: float = 5.0) -> dict:
    """Rihaczek norm against modulation norm for chirped Gaussians.

    For each rate ``c`` the signal is ``f = exp(-pi t^2 / sigma^2 + i pi c t^2)``
    and the window ``g = exp(-pi t^2 / sigma^2)`` is fixed. The reported
    ratio is ``||W_0(f, g)||_{L^{p,q}} / ||V_g f||_{L^{p,q}}``, which a norm
    equivalence would keep bounded. The default grid resolves the chirps
    up to ``c sigma^2 = 32`` without aliasing.
    """
    spec = spec or MixedNormSpec(1, np.inf)
    unweighted = MixedNormSpec(spec.p, spec.q)
    fam, g = chirp_family(rates, N, dx, sigma)
    gh = SampledSignal(centered_dft(g.values, 0, g.dx), 1.0 / (N * dx))
    out = {"rates": [], "mod_norm": [], "rihaczek_norm": [], "ratio": [], "identity_residual": [],
           "N": N, "dx": dx, "sigma": sigma, "spec": unweighted.to_dict()}
    for c, f in zip(rates, fam.values()):
        rn = mixed_norm(named_distribution("rihaczek", f, g), unweighted)
        mn = mod_norm(f, g, unweighted)
        out["rates"].append(float(c))
        out["mod_norm"].append(mn)
        out["rihaczek_norm"].append(rn)
        out["ratio"].append(rn / mn)
        rhs = lp_norm(f, spec.p) * lp_norm(gh, spec.q)
        out["identity_residual"].append(abs(rn - rhs) / rhs)
    r = np.array(out["ratio"])
    out["monotone"] = bool(np.all(np.diff(r) > 0))
    out["growth"] = float(r[-1] / r[0])
    return out


DEFAULT_SWEEP = tuple(k / 25 for k in (0, 1, 2, 4, 8, 16, 32))
