"""Verification suites shared by the command line and the acceptance tests.

Every suite returns a :class:`SuiteResult` holding named checks with the
measured value, the threshold and a pass flag. All randomness flows from
one seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from . import frames as fr
from . import modspaces as ms
from .gaussian import (
    ChirpFunction,
    GeneralizedGaussian,
    inner_product_gaussian,
    standard_gaussian,
    wigner_A_gaussian,
)
from .metaplectic import SampledSignal, factorize, linear_resample, phase_blind_compare
from .symplectic import (
    BlockSymplectic,
    covariant_template,
    derived_blocks,
    is_covariant,
    make_composite,
    make_named,
    omega,
    random_symplectic,
    rotation,
)

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "run_suites", "random_bandlimited", "random_gaussian"]


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    relation: str = "<="
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.detail}]" if self.detail else ""
        return f"{tag}  {self.name}: {self.value:.3e} (required {self.relation} {self.threshold:g}){extra}"

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "value": float(self.value),
                "threshold": float(self.threshold), "relation": self.relation, "detail": self.detail}


def _check(name, value, threshold, relation="<=", detail="") -> Check:
    value = float(value)
    ok = {"<=": value <= threshold, ">=": value >= threshold, ">": value > threshold, "<": value < threshold,
          "==": value == threshold}[relation]
    return Check(name, bool(ok), value, threshold, relation, detail)


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]

    def to_dict(self) -> dict:
        out = {"suite": self.name, "passed": self.passed, "elapsed": self.elapsed,
               "checks": [c.to_dict() for c in self.checks]}
        if self.data:
            out["data"] = self.data
        return out


# ----------------------------------------------------------------------------
# test signals


def random_bandlimited(rng, N: int = 256, dx: float = 1 / 16, packets: int = 3) -> SampledSignal:
    """Normalized sum of Gaussian wave packets concentrated near the origin."""
    t = (np.arange(N) - N // 2) * dx
    v = np.zeros(N, dtype=complex)
    for _ in range(packets):
        c = rng.uniform(-1.0, 1.0)
        w = rng.uniform(0.7, 1.2)
        k = rng.uniform(-1.0, 1.0)
        a = rng.normal() + 1j * rng.normal()
        v += a * np.exp(-np.pi * ((t - c) / w) ** 2 + 2j * np.pi * k * t)
    s = SampledSignal(v, dx)
    return s.with_values(s.values / s.norm())


def random_gaussian(rng, n: int = 1) -> GeneralizedGaussian:
    X = rng.normal(size=(n, n))
    Y = rng.normal(size=(n, n))
    Q = (X + X.T) / 2 + 1j * (Y @ Y.T + 0.5 * np.eye(n))
    p = rng.normal(size=n) + 1j * rng.normal(size=n) * 0.3
    return GeneralizedGaussian(rng.normal() + 1j * rng.normal(), Q, p)


def _gauss(N, dx, width=1.0, shift=0.0, freq=0.0, chirp=0.0) -> SampledSignal:
    t = (np.arange(N) - N // 2) * dx
    v = np.exp(-np.pi * ((t - shift) / width) ** 2 + 2j * np.pi * freq * t + 1j * np.pi * chirp * t**2)
    s = SampledSignal(v, dx)
    return s.with_values(s.values / s.norm())


def composite_free() -> BlockSymplectic:
    """Composite projection with a free outer matrix (``S = R_1``, ``S1 = S2 = I``)."""
    I = BlockSymplectic(np.eye(2))
    return make_composite(rotation(1.0), I, I)


# ----------------------------------------------------------------------------
# suites


def suite_factorization(seed=0, count=10_000, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    failures = 0
    for i in range(count):
        S = random_symplectic(1 + i % 2, rng)
        try:
            f = factorize(S)
            worst = max(worst, float(np.max(np.abs(f.projection() - S.matrix))))
        except (ArithmeticError, ValueError):
            failures += 1
    el = time.perf_counter() - t0
    return SuiteResult("factorization", [
        _check(f"projection-product residual over {count} random matrices (d in 1,2)", worst, 1e-9),
        _check("factorizations that raised", failures, 0, "=="),
        _check("factorization runtime [s]", el, 30.0, "<"),
    ])


def suite_moyal(seed=0, N=256, dx=1 / 16, oracle_count=100, grid_count=6, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(oracle_count):
        A = random_symplectic(2, rng)
        fact = factorize(A)
        G = [random_gaussian(rng) for _ in range(4)]
        W1 = wigner_A_gaussian(A, G[0], G[1], fact)
        W2 = wigner_A_gaussian(A, G[2], G[3], fact)
        lhs = inner_product_gaussian(W1, W2)
        rhs = inner_product_gaussian(G[0], G[2]) * np.conj(inner_product_gaussian(G[1], G[3]))
        scale = np.prod([g.norm() for g in G])
        worst = max(worst, abs(lhs - rhs) / scale)
    checks = [_check(f"oracle Moyal identity, {oracle_count} random A", worst, 1e-10)]

    mats = [make_named("stft"), make_named("wigner"), make_named("tau", tau=0.3), make_named("rihaczek"),
            make_named("hbar", hbar=0.2), dist.ambiguity_projection()]
    mats += [random_symplectic(2, rng, scale=0.4) for _ in range(grid_count)]
    gworst = 0.0
    for A in mats:
        f1, g1, f2, g2 = (random_bandlimited(rng, N, dx) for _ in range(4))
        gworst = max(gworst, dist.moyal_check(A, f1, g1, f2, g2))
    el = time.perf_counter() - t0
    checks.append(_check(f"grid Moyal identity, {len(mats)} matrices, N={N}", gworst, 1e-4))
    checks.append(_check("Moyal suite runtime [s]", el, 60.0, "<"))
    return SuiteResult("moyal", checks)


def _template_sample(rng):
    a11 = rng.normal(scale=0.5)
    a13 = rng.normal(scale=0.3)
    a21 = rng.normal(scale=0.3)
    return covariant_template([[a11]], [[a13]], [[a21]])


def _on_grid_z(rng, N, dx):
    dxi = 1.0 / (N * dx)
    return (rng.integers(-12, 13) * dx, rng.integers(-12, 13) * dxi)


def suite_covariance(seed=0, N=256, dx=1 / 16, count=50, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    f = _gauss(N, dx, 1.0, 0.3, 0.2, 0.4)
    g = _gauss(N, dx, 0.9, -0.2, -0.1)
    worst = 0.0
    noncov = 0
    for _ in range(count):
        A = _template_sample(rng)
        if not is_covariant(A):
            noncov += 1
        worst = max(worst, dist.covariance_check(A, _on_grid_z(rng, N, dx), f, g))
    checks = [
        _check(f"covariance residual over {count} template matrices", worst, 1e-4),
        _check("template matrices classified as non-covariant", noncov, 0, "=="),
    ]
    Ast = make_named("stft")
    zs = [(0.5, 0.0), (0.0, 0.5), (0.75, -0.5)]
    st = max(dist.covariance_check(Ast, z, f, g) for z in zs)
    checks.append(_check("A_st exact-equality covariance residual (max over z)", st, 0.1, ">"))
    checks.append(_check("A_st classified covariant (0 = false)", float(is_covariant(Ast)), 0, "=="))
    checks.append(_check("A_st modulus-level residual", max(dist.covariance_check(Ast, z, f, g, modulus=True) for z in zs), 1e-4))
    return SuiteResult("covariance", checks)


def suite_cohen(seed=0, N=256, dx=1 / 16, count=50, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    f = _gauss(N, dx, 1.0, 0.3, 0.2, 0.4)
    g = _gauss(N, dx, 0.9, -0.2, -0.1)
    worst = max(dist.cohen_multiplier_check(_template_sample(rng), f, g) for _ in range(count))
    return SuiteResult("cohen", [
        _check(f"Cohen multiplier residual over {count} template matrices", worst, 1e-3),
        _check("Cohen multiplier residual, A_1/2", dist.cohen_multiplier_check(make_named("wigner"), f, g), 1e-6),
        _check("Cohen multiplier residual, A_tau(0.3)", dist.cohen_multiplier_check(make_named("tau", tau=0.3), f, g), 1e-3),
    ])


def suite_rescaled(seed=0, N=256, dx=1 / 16, **_) -> SuiteResult:
    f = _gauss(N, dx, 1.0, 0.3, 0.2, 0.4)
    g = _gauss(N, dx, 0.9, -0.2, -0.1, -0.3)
    checks = []
    for name, A in [("A_st", make_named("stft")), ("A_1/2", make_named("wigner")),
                    ("A_tau(0.3)", make_named("tau", tau=0.3)), ("composite", composite_free())]:
        Wg = dist.wigner_A_grid(A, f, g, method="general")
        Wf = dist.wigner_A_grid(A, f, g, method="fast")
        checks.append(_check(f"{name}: general vs fast path", phase_blind_compare(Wg.values, Wf.values)[1], 1e-3))
        dv = derived_blocks(A)
        h = dist.deform_window(A, g)
        V = dist.stft_grid(f, h)
        # |Phi_M| = 1, so the chirp is removed before resampling to keep the field smooth
        TV = linear_resample(V.values * ChirpFunction(dv.M)(V.points()), V.dx, np.linalg.inv(dv.E))
        res = np.linalg.norm(np.abs(Wg.values) - np.abs(TV)) / np.linalg.norm(Wg.values)
        checks.append(_check(f"{name}: |W_A| vs |det E|^-1/2 |V(E^-1 z)|", res, 1e-3))
    return SuiteResult("rescaled", checks)


def suite_paths(seed=0, N=256, dx=1 / 16, **_) -> SuiteResult:
    f = _gauss(N, dx, 1.0, 0.3, 0.2, 0.4)
    g = _gauss(N, dx, 0.9, -0.2, -0.1, -0.3)
    J = BlockSymplectic(omega(1))
    I = BlockSymplectic(np.eye(2))
    S1 = BlockSymplectic(np.array([[1.0, 0.0], [0.5, 1.0]]))
    cases = [("stft", {}), ("tau", {"tau": 0.3}), ("ambiguity", {}), ("rihaczek", {}), ("spectrogram", {}),
             ("genspec", {}), ("hbar", {"hbar": 0.2}), ("newwv", {"S": J, "S1": S1, "S2": I})]
    checks = []
    for kind, args in cases:
        D = dist.named_distribution(kind, f, g, **args)
        A = dist.projection_of(kind, **args)
        W = dist.wigner_A_grid(A, f, g, method="general")
        if kind == "spectrogram":
            res = np.linalg.norm(D.values - np.abs(W.values) ** 2) / np.linalg.norm(D.values)
        else:
            res = phase_blind_compare(D.values, W.values)[1]
        checks.append(_check(f"{kind}: direct formula vs W_A of its projection", res, 1e-3))
    w_half = np.max(np.abs(make_named("tau", tau=0.5).matrix - make_named("wigner").matrix))
    w_zero = np.max(np.abs(make_named("tau", tau=0.0).matrix - make_named("rihaczek").matrix))
    checks.append(_check("tau = 1/2 projection equals Wigner projection", w_half, 0, "=="))
    checks.append(_check("tau = 0 projection equals Rihaczek projection", w_zero, 0, "=="))
    d_half = np.max(np.abs(dist.named_distribution("tau", f, g, tau=0.5).values - dist.named_distribution("wigner", f, g).values))
    checks.append(_check("tau(1/2) grid equals Wigner grid", d_half, 0, "=="))
    d_zero = phase_blind_compare(dist.named_distribution("tau", f, g, tau=0.0).values,
                                 dist.named_distribution("rihaczek", f, g).values)[1]
    checks.append(_check("tau(0) grid vs Rihaczek grid", d_zero, 1e-10))
    return SuiteResult("paths", checks)


def suite_frames(seed=0, N=256, dx=1 / 16, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    g = SampledSignal.from_gaussian(standard_gaussian(), N, dx)
    f = random_bandlimited(rng, N, dx)
    checks = []
    for name, A in [("A_st", make_named("stft")), ("A_1/2", make_named("wigner"))]:
        lat = fr.Lattice(0.5, 0.5)
        try:
            dw = fr.dual_window(A, g, lat)
            c = fr.coefficients(A, g, lat, f)
            rec = fr.reconstruct(A, g, dw.gamma, lat, c)
            err = np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values)
            checks.append(_check(f"{name}, a=b=1/2: CG iterations", dw.iterations, 200, "<="))
            checks.append(_check(f"{name}, a=b=1/2: reconstruction error", err, 1e-6,
                                 detail=f"bounds {dw.bounds[0]:.3g}, {dw.bounds[1]:.3g}"))
        except fr.NotAFrameError as exc:
            checks.append(_check(f"{name}, a=b=1/2: CG iterations", exc.iterations or 0, 200, "<="))
            checks.append(_check(f"{name}, a=b=1/2: reconstruction error", np.inf, 1e-6,
                                 detail=f"degeneracy diagnostic raised: {exc}"))
    try:
        fr.dual_window(make_named("stft"), g, fr.Lattice(1.0, 1.0))
        fired, detail = 0.0, "no diagnostic"
    except fr.NotAFrameError as exc:
        fired, detail = 1.0, f"bounds {exc.bounds[0]:.2e}, {exc.bounds[1]:.2e}"
    checks.append(_check("A_st, a=b=1: degeneracy diagnostic fired (1 = yes)", fired, 1, "==", detail))
    return SuiteResult("frames", checks)


def suite_inversion(seed=0, N=256, dx=1 / 16, **_) -> SuiteResult:
    f = _gauss(N, dx, 1.1, 0.4, 0.3)
    g = SampledSignal.from_gaussian(standard_gaussian(), N, dx)
    gamma = _gauss(N, dx, 0.8, -0.1, 0.1)
    checks = []
    for name, A in [("A_st", make_named("stft")), ("A_1/2", make_named("wigner"))]:
        rec = fr.inversion_integral(A, g, gamma, f)
        err = np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values)
        checks.append(_check(f"{name}: continuous inversion error", err, 1e-3))
    return SuiteResult("inversion", checks)


def suite_modnorm(seed=0, N=256, dx=1 / 16, **_) -> SuiteResult:
    exps = (1.0, 2.0, np.inf)
    fam = ms.test_family(N, dx)
    g = SampledSignal.from_gaussian(standard_gaussian(), N, dx)
    worst = 0.0
    for f in (fam["chirp_1"], fam["two_bump_mod"]):
        for p in exps:
            for q in exps:
                worst = max(worst, ms.rihaczek_identity_check(f, g, ms.MixedNormSpec(p, q)))
    checks = [_check("Rihaczek norm identity residual on {1,2,inf}^2", worst, 1e-6)]
    sw = ms.chirp_sweep(ms.DEFAULT_SWEEP, ms.MixedNormSpec(1, np.inf))
    checks.append(_check("chirp sweep (p=1, q=inf): ratio growth", sw["growth"], 5.0, ">="))
    checks.append(_check("chirp sweep: ratio monotone (1 = yes)", float(sw["monotone"]), 1, "=="))
    cfam, cg = ms.chirp_family(ms.DEFAULT_SWEEP)
    specs = [ms.MixedNormSpec(p, p) for p in exps]
    experiments = []
    for name, A in [("A_st", make_named("stft")), ("A_1/2", make_named("wigner")), ("A_tau(0.3)", make_named("tau", tau=0.3))]:
        env = 0.0
        for r in ms.equivalence_ratios(A, cg, specs, cfam) + ms.equivalence_ratios(A, g, specs, fam):
            env = max(env, r["max"] / r["min"])
            experiments.append({"projection": name, **r})
        checks.append(_check(f"{name}: equivalence ratio envelope max/min", env, 50.0))
    return SuiteResult("modnorm", checks, data={"sweep": sw, "equivalence": experiments})


SUITES = {
    "moyal": suite_moyal,
    "covariance": suite_covariance,
    "cohen": suite_cohen,
    "rescaled": suite_rescaled,
    "paths": suite_paths,
    "frames": suite_frames,
    "inversion": suite_inversion,
    "modnorm": suite_modnorm,
    "factorization": suite_factorization,
}


def run_suite(name: str, **kw) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    t0 = time.perf_counter()
    res = SUITES[name](**kw)
    res.elapsed = time.perf_counter() - t0
    return res


def run_suites(names, **kw) -> list[SuiteResult]:
    if isinstance(names, str):
        names = list(SUITES) if names == "all" else [names]
    return [run_suite(n, **kw) for n in names]
