import numpy as np
import pytest

from mtfa import distributions as dist
from mtfa.gaussian import standard_gaussian
from mtfa.metaplectic import SampledSignal, phase_blind_compare
from mtfa.symplectic import BlockSymplectic, covariant_template, derived_blocks, make_named, rotation
from mtfa.verify import composite_free, random_bandlimited

N, DX = 256, 1 / 16


@pytest.fixture(scope="module")
def g0():
    return SampledSignal.from_gaussian(standard_gaussian(), N, DX)


@pytest.fixture(scope="module")
def pair():
    rng = np.random.default_rng(7)
    return random_bandlimited(rng), random_bandlimited(rng)


def radius2(W):
    z = W.points()
    return z[..., 0] ** 2 + z[..., 1] ** 2


class TestWignerGrid:
    def test_stft_modulus_of_gaussian(self, g0):
        W = dist.wigner_A_grid(make_named("stft"), g0, g0)
        assert np.max(np.abs(np.abs(W.values) - np.exp(-np.pi * radius2(W) / 2))) <= 1e-3

    @pytest.mark.parametrize("method", ["general", "fast"])
    def test_wigner_modulus_of_gaussian(self, g0, method):
        W = dist.wigner_A_grid(make_named("wigner"), g0, g0, method=method)
        assert np.max(np.abs(np.abs(W.values) - 2 * np.exp(-2 * np.pi * radius2(W)))) <= 1e-3

    def test_grid_spacing_self_dual(self, g0):
        W = dist.wigner_A_grid(make_named("stft"), g0, g0)
        assert W.dxi == pytest.approx(1 / (N * DX))

    def test_fast_path_refused_for_non_shift_invertible(self, g0):
        with pytest.raises(ValueError):
            dist.wigner_A_grid(make_named("rihaczek"), g0, g0, method="fast")

    def test_path_cross_check_metadata(self, g0):
        W = dist.wigner_A_grid(make_named("tau", tau=0.3), g0, g0, method="fast", check_paths=True)
        assert W.meta["path_residual"] <= 1e-3

    def test_grid_mismatch(self, g0):
        other = SampledSignal.from_gaussian(standard_gaussian(), 128, DX)
        with pytest.raises(ValueError):
            dist.wigner_A_grid(make_named("stft"), g0, other)

    @pytest.mark.parametrize("A", [make_named("stft"), make_named("tau", tau=0.2), make_named("rihaczek")],
                             ids=["stft", "tau0.2", "rihaczek"])
    def test_moyal_polarized(self, A):
        rng = np.random.default_rng(1)
        f1, g1, f2, g2 = (random_bandlimited(rng) for _ in range(4))
        assert dist.moyal_check(A, f1, g1, f2, g2) <= 1e-4

    def test_energy(self, pair):
        f, g = pair
        W = dist.wigner_A_grid(make_named("wigner"), f, g)
        assert W.norm() == pytest.approx(f.norm() * g.norm(), rel=1e-4)


class TestNamed:
    def test_tau_half_is_wigner(self, pair):
        f, g = pair
        a = dist.named_distribution("tau", f, g, tau=0.5).values
        b = dist.named_distribution("wigner", f, g).values
        np.testing.assert_array_equal(a, b)

    def test_spectrogram_is_squared_stft(self, pair):
        f, g = pair
        S = dist.named_distribution("spectrogram", f, g).values
        V = dist.named_distribution("stft", f, g).values
        np.testing.assert_array_equal(S, np.abs(V) ** 2)

    def test_rihaczek_of_gaussian(self, g0):
        R = dist.named_distribution("rihaczek", g0)
        z = R.points()
        ref = np.sqrt(2) * np.exp(-np.pi * radius2(R)) * np.exp(-2j * np.pi * z[..., 0] * z[..., 1])
        assert np.max(np.abs(R.values - ref)) <= 1e-6

    def test_zero_window(self, g0):
        with pytest.raises(ValueError):
            dist.named_distribution("stft", g0, g0.with_values(np.zeros(N)))

    def test_unknown(self, g0):
        with pytest.raises(ValueError):
            dist.named_distribution("choi_williams", g0)

    @pytest.mark.parametrize("kind,args", [
        ("stft", {}),
        ("tau", {"tau": 0.3}),
        ("wigner", {}),
        ("ambiguity", {}),
        ("rihaczek", {}),
        ("genspec", {}),
        ("hbar", {"hbar": 0.5}),
        ("newwv", {"S": rotation(1.0), "S1": BlockSymplectic(np.eye(2)), "S2": BlockSymplectic(np.eye(2))}),
    ])
    def test_matches_projection(self, g0, kind, args):
        f = SampledSignal.from_function(lambda t: np.exp(-np.pi * (t - 0.3) ** 2 + 2j * np.pi * 0.4 * t), N, DX)
        direct = dist.named_distribution(kind, f, g0, **args)
        A = dist.projection_of(kind, **args)
        grid = dist.wigner_A_grid(A, f, g0, method="general")
        assert phase_blind_compare(direct.values, grid.values)[1] <= 1e-3


class TestShifts:
    def test_zero_shift(self, pair):
        f, _ = pair
        np.testing.assert_array_equal(dist.tf_shift((0, 0), f).values, f.values)

    def test_one_sample(self, pair):
        f, _ = pair
        s = dist.tf_shift((DX, 0.0), f)
        np.testing.assert_array_equal(s.values[1:], f.values[:-1])
        assert s.values[0] == 0 and "spill" in s.meta

    def test_unitary(self, pair):
        f, _ = pair
        s = dist.tf_shift((5 * DX, 3 / (N * DX)), f)
        assert s.norm() == pytest.approx(f.norm(), rel=1e-12)

    def test_off_grid_uses_interpolation(self, g0):
        s = dist.tf_shift((0.3 * DX, 0.0), g0)
        ref = standard_gaussian()(g0.x - 0.3 * DX)
        assert np.max(np.abs(s.values - ref)) < 1e-12


class TestCovariance:
    z = (8 * DX, 5 / (N * DX))

    def test_wigner(self, pair):
        f, g = pair
        assert dist.covariance_check(make_named("wigner"), self.z, f, g) <= 1e-4

    def test_zero_shift(self, pair):
        f, g = pair
        assert dist.covariance_check(make_named("tau", tau=0.3), (0.0, 0.0), f, g) <= 1e-12

    def test_stft_phase_only(self, pair):
        f, g = pair
        A = make_named("stft")
        assert dist.covariance_check(A, self.z, f, g) > 0.1
        assert dist.covariance_check(A, self.z, f, g, modulus=True) <= 1e-4

    def test_off_grid_rejected(self, pair):
        f, g = pair
        with pytest.raises(ValueError):
            dist.covariance_check(make_named("wigner"), (0.3 * DX, 0.0), f, g)

    def test_template(self, pair):
        f, g = pair
        A = covariant_template([[0.3]], [[0.2]], [[-0.1]])
        assert dist.covariance_check(A, self.z, f, g) <= 1e-4


class TestCohen:
    def test_wigner_multiplier_is_one(self, pair):
        f, g = pair
        assert dist.cohen_multiplier_check(make_named("wigner"), f, g) <= 1e-6

    def test_tau_multiplier_formula(self):
        tau = 0.3
        B = derived_blocks(make_named("tau", tau=tau)).B
        zeta = np.array([[0.4, -1.3], [2.0, 0.7], [0.0, 5.0]])
        expected = np.exp(-2j * np.pi * (tau - 0.5) * zeta[:, 0] * zeta[:, 1])
        np.testing.assert_allclose(dist.CohenMultiplier(B)(zeta), expected, atol=1e-14)

    def test_tau(self, pair):
        f, g = pair
        assert dist.cohen_multiplier_check(make_named("tau", tau=0.3), f, g) <= 1e-3

    def test_template(self, pair):
        f, g = pair
        A = covariant_template([[0.6]], [[-0.15]], [[0.1]])
        assert dist.cohen_multiplier_check(A, f, g) <= 1e-3

    def test_non_covariant_rejected(self, pair):
        f, g = pair
        with pytest.raises(ValueError):
            dist.cohen_multiplier_check(make_named("stft"), f, g)


class TestRescaledIdentity:
    @pytest.mark.parametrize("A", [make_named("stft"), make_named("wigner"), make_named("tau", tau=0.3), composite_free()],
                             ids=["stft", "wigner", "tau0.3", "composite"])
    def test_fast_equals_general(self, A, pair):
        f, g = pair
        Wg = dist.wigner_A_grid(A, f, g, method="general")
        Wf = dist.wigner_A_grid(A, f, g, method="fast")
        assert phase_blind_compare(Wf.values, Wg.values)[1] <= 1e-3

    def test_modulus_identity_wigner(self, g0, pair):
        # |W_A(f,g)(z)| = |det E|^{-1/2} |V_h f(E^{-1} z)| with E = I/2 and h = g(-.)
        f, _ = pair
        W = dist.wigner_A_grid(make_named("wigner"), f, g0, method="general")
        h = g0.with_values(g0.values[(-np.arange(N)) % N])
        V = dist.stft_grid(f, h)
        # E^{-1} z = 2 z: take the grid points whose double is on the grid
        sub = np.abs(W.values[N // 4: 3 * N // 4, N // 4: 3 * N // 4])
        ref = np.sqrt(4.0) * np.abs(V.values[::2, ::2])
        assert np.max(np.abs(sub - ref)) / np.max(ref) <= 1e-3
