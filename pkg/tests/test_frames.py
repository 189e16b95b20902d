import numpy as np
import pytest

from mtfa import frames as fr
from mtfa.distributions import wigner_A_grid
from mtfa.gaussian import standard_gaussian
from mtfa.metaplectic import SampledSignal, phase_blind_compare
from mtfa.symplectic import derived_blocks, make_named
from mtfa.verify import random_bandlimited

N, DX = 256, 1 / 16
A_ST = make_named("stft")
A_W = make_named("wigner")


@pytest.fixture(scope="module")
def g0():
    return SampledSignal.from_gaussian(standard_gaussian(), N, DX)


@pytest.fixture(scope="module")
def f():
    return random_bandlimited(np.random.default_rng(3))


@pytest.fixture(scope="module")
def stft_frame(g0):
    lat = fr.Lattice(0.5, 0.5)
    fs = fr.FrameSystem(A_ST, g0, lat)
    return fs, fr.dual_window(A_ST, g0, lat, system=fs)


class TestDeformation:
    def test_stft_is_identity(self, g0):
        h = fr.deformation_window(A_ST, g0)
        assert phase_blind_compare(h.values, g0.values)[1] < 1e-12

    def test_wigner_gives_normalized_gaussian(self, g0):
        h = fr.deformation_window(A_W, g0, validate=True)
        assert h.meta["validation_residual"] <= 1e-2
        assert h.norm() == pytest.approx(1.0, abs=1e-6)
        # for E = I/2 the deformation is the reflection g(-.), which fixes the even g0
        assert phase_blind_compare(h.values, g0.values)[1] < 1e-10

    def test_wigner_reflects(self, g0):
        odd = g0.with_values(g0.x * g0.values)
        h = fr.deformation_window(A_W, odd)
        # sample j of the reflected window sits at index N - j
        assert phase_blind_compare(h.values[1:], odd.values[:0:-1])[1] < 1e-10

    @pytest.mark.parametrize("A", [A_ST, A_W, make_named("tau", tau=0.3)], ids=["stft", "wigner", "tau0.3"])
    def test_validation_paths_agree(self, A, g0):
        fr.deformation_window(A, g0, validate=True)

    def test_unitary(self, g0):
        h = fr.deformation_window(make_named("tau", tau=0.3), g0)
        assert h.norm() == pytest.approx(g0.norm(), rel=1e-6)

    def test_round_trip(self, g0):
        h = fr.deformation_window(A_W, g0)
        back = fr.undeform_window(A_W, h)
        assert phase_blind_compare(back.values, g0.values)[1] < 1e-10

    def test_not_shift_invertible(self, g0):
        with pytest.raises(ValueError):
            fr.deformation_window(make_named("rihaczek"), g0)


class TestAtoms:
    def test_stft_atom_at_origin(self, g0):
        a = fr.atom(A_ST, np.zeros(2), g0)
        np.testing.assert_allclose(a.values, g0.values, atol=1e-14)

    def test_stft_atom_is_tf_shift(self, g0):
        z = np.array([1.0, 0.75])
        a = fr.atom(A_ST, z, g0)
        ref = np.exp(2j * np.pi * z[1] * g0.x) * standard_gaussian()(g0.x - z[0])
        assert phase_blind_compare(a.values, ref)[1] < 1e-12

    @pytest.mark.parametrize("A", [A_ST, A_W, make_named("tau", tau=0.3)], ids=["stft", "wigner", "tau0.3"])
    def test_norm(self, A, g0):
        z = np.array([[0.5, -0.25], [1.0, 1.0], [-2.0, 0.5]])
        detE = abs(np.linalg.det(derived_blocks(A).E))
        norms = np.linalg.norm(fr.atoms(A, z, g0), axis=1) * np.sqrt(DX)
        np.testing.assert_allclose(norms, detE**-0.5 * g0.norm(), rtol=1e-6)

    @pytest.mark.parametrize("A", [A_ST, A_W, make_named("tau", tau=0.3)], ids=["stft", "wigner", "tau0.3"])
    def test_single_global_constant(self, A, g0, f):
        W = wigner_A_grid(A, f, g0, method="general")
        Einv = np.linalg.inv(derived_blocks(A).E)
        pts = W.points().reshape(-1, 2)
        mu = pts @ Einv.T
        L = N * DX / 2
        inside = (np.abs(mu[:, 0]) < L * 0.9) & (np.abs(mu[:, 1]) < 0.9 / (2 * DX))
        vals = W.values.reshape(-1)
        strong = inside & (np.abs(vals) > 1e-3 * np.abs(vals).max())
        ip = (fr.atoms(A, pts[strong], g0).conj() @ f.values) * DX
        const = vals[strong] / ip
        assert np.var(const) <= 1e-6
        assert np.allclose(np.abs(const), 1.0, atol=1e-6)


class TestLattice:
    def test_validation(self):
        with pytest.raises(ValueError):
            fr.Lattice(0.0, 1.0)
        with pytest.raises(ValueError):
            fr.Lattice(0.5, 0.5).check_grid(N, 0.3)

    def test_points_cover_grid(self):
        pts = fr.Lattice(0.5, 0.5).points(N, DX)
        assert len(pts) == 32 * 32
        assert pts[:, 0].min() == -8.0 and pts[:, 0].max() == 7.5

    def test_radius(self):
        pts = fr.Lattice(0.5, 0.5, R=2.0).points(N, DX)
        assert np.max(np.abs(pts)) <= 2.0


class TestFrameOperator:
    def test_self_adjoint_and_positive(self, stft_frame):
        fs, _ = stft_frame
        rng = np.random.default_rng(0)
        u = rng.normal(size=N) + 1j * rng.normal(size=N)
        v = rng.normal(size=N) + 1j * rng.normal(size=N)
        Su, Sv = fs.apply(u), fs.apply(v)
        assert abs(np.vdot(v, Su) - np.vdot(Sv, u)) <= 1e-8 * np.linalg.norm(Su) * np.linalg.norm(v)
        assert np.vdot(u, Su).real > 0

    def test_zero_maps_to_zero(self, g0):
        zero = g0.with_values(np.zeros(N))
        out = fr.frame_operator(A_ST, g0, fr.Lattice(0.5, 0.5), zero)
        assert not np.any(out.values)

    def test_operator_matches_sum(self, g0, f):
        lat = fr.Lattice(1.0, 0.5)
        fs = fr.FrameSystem(A_W, g0, lat)
        direct = fs.synthesis(fs.analysis(f))
        np.testing.assert_allclose(fr.frame_operator(A_W, g0, lat, f).values, direct, atol=1e-12)


class TestDualWindow:
    def test_stft_half(self, stft_frame, f, g0):
        fs, dw = stft_frame
        assert dw.iterations <= 200
        lo, hi = dw.bounds
        assert 0 < lo <= hi
        rec = fr.reconstruct(A_ST, g0, dw.gamma, fs.lattice, fs.analysis(f))
        assert np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values) <= 1e-8

    def test_critical_density_diagnostic(self, g0):
        with pytest.raises(fr.NotAFrameError) as info:
            fr.dual_window(A_ST, g0, fr.Lattice(1.0, 1.0))
        lo, hi = info.value.bounds
        assert lo <= 1e-8 * hi

    def test_wigner_quarter_lattice(self, g0, f):
        lat = fr.Lattice(0.25, 0.25)
        dw = fr.dual_window(A_W, g0, lat)
        rec = fr.reconstruct(A_W, g0, dw.gamma, lat, fr.coefficients(A_W, g0, lat, f))
        assert np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values) <= 1e-6

    def test_wigner_half_lattice_is_critical(self, g0):
        # E = I/2 turns the a = b = 1/2 lattice into Z^2 for the deformed window
        with pytest.raises(fr.NotAFrameError):
            fr.dual_window(A_W, g0, fr.Lattice(0.5, 0.5))

    def test_error_decreases_with_radius(self, stft_frame, g0):
        fs, dw = stft_frame
        f = SampledSignal.from_function(lambda t: np.exp(-np.pi * (t / 1.5) ** 2 + 2j * np.pi * 0.5 * t), N, DX)
        c = fs.analysis(f)
        errs = []
        for R in (1.5, 2.5, 3.5):
            keep = np.max(np.abs(fs.points), axis=1) <= R
            rec = fr.reconstruct(A_ST, g0, dw.gamma, fs.lattice, np.where(keep, c, 0))
            errs.append(np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values))
        assert errs[0] > errs[1] > errs[2]


class TestReconstruct:
    def test_zero_coefficients(self, stft_frame, g0):
        fs, dw = stft_frame
        rec = fr.reconstruct(A_ST, g0, dw.gamma, fs.lattice, np.zeros(len(fs.points)))
        assert not np.any(rec.values)

    def test_single_coefficient(self, stft_frame, g0):
        fs, dw = stft_frame
        c = np.zeros(len(fs.points), complex)
        k = 100
        c[k] = 2 - 1j
        rec = fr.reconstruct(A_ST, g0, dw.gamma, fs.lattice, c)
        np.testing.assert_allclose(rec.values, (2 - 1j) * fr.atom(A_ST, fs.points[k], dw.gamma).values, atol=1e-14)

    def test_index_mismatch(self, stft_frame, g0):
        fs, dw = stft_frame
        with pytest.raises(ValueError):
            fr.reconstruct(A_ST, g0, dw.gamma, fs.lattice, np.zeros(3))


class TestInversion:
    def test_stft_gaussian(self, g0):
        rec = fr.inversion_integral(A_ST, g0, g0, g0)
        assert np.linalg.norm(rec.values - g0.values) / np.linalg.norm(g0.values) <= 1e-3

    def test_wigner_gaussian_triple(self, g0):
        f = SampledSignal.from_function(lambda t: np.exp(-np.pi * (t - 0.4) ** 2 / 1.2), N, DX)
        gamma = SampledSignal.from_function(lambda t: np.exp(-np.pi * (t + 0.1) ** 2 / 0.7), N, DX)
        rec = fr.inversion_integral(A_W, g0, gamma, f)
        assert np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values) <= 1e-3

    def test_orthogonal_windows(self, g0):
        odd = g0.with_values(g0.x * g0.values)
        with pytest.raises(ValueError):
            fr.inversion_integral(A_ST, g0, odd, g0)
