import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtfa.gaussian import apply_factorization_gaussian, evaluate_gaussian, standard_gaussian
from mtfa.metaplectic import (
    Factorization,
    Generator,
    SampledSignal,
    SpillWarning,
    TimeFrequencyGrid,
    apply_discrete,
    centered_dft,
    centered_idft,
    factorize,
    grid_coords,
    linear_resample,
    phase_blind_compare,
)
from mtfa.symplectic import BlockSymplectic, omega, random_symplectic, rotation
from mtfa.verify import random_bandlimited

N, DX = 256, 1 / 16
g0 = standard_gaussian()


def sampled_g0(N=N, dx=DX):
    return SampledSignal.from_gaussian(g0, N, dx)


class TestGenerator:
    def test_projections(self):
        np.testing.assert_array_equal(Generator("fourier").projection(1), omega(1))
        np.testing.assert_allclose(Generator("linear", [[2.0]]).projection(1), [[0.5, 0], [0, 2.0]])
        np.testing.assert_array_equal(Generator("chirp", [[3.0]]).projection(1), [[1, 0], [3, 1]])

    def test_bad_generators(self):
        with pytest.raises(ValueError):
            Generator("shear", [[1.0]])
        with pytest.raises(ValueError):
            Generator("linear", [[0.0]])
        with pytest.raises(ValueError):
            Generator("chirp", [[0.0, 1.0], [0.0, 0.0]])


class TestFactorize:
    def test_fourier(self):
        f = factorize(BlockSymplectic(omega(1)))
        assert [g.kind for g in f.generators] == ["fourier"]

    def test_chirp(self):
        P = np.array([[0.3, -0.2], [-0.2, 1.1]])
        S = BlockSymplectic(np.block([[np.eye(2), np.zeros((2, 2))], [P, np.eye(2)]]))
        f = factorize(S)
        assert len(f.generators) == 1 and f.generators[0].kind == "chirp"
        np.testing.assert_allclose(f.generators[0].matrix, P)

    def test_free_route_has_four_steps(self):
        S = rotation(0.7)
        f = factorize(S)
        assert [g.kind for g in f.generators] == ["chirp", "fourier", "linear", "chirp"]
        assert f.residual <= 1e-12

    def test_non_free_uses_rotation(self):
        # B = 0 is handled directly; a rank-deficient B at d = 2 needs the rotation fallback
        S = BlockSymplectic(np.block([[np.eye(2), np.diag([1.0, 0.0])], [np.zeros((2, 2)), np.eye(2)]]))
        f = factorize(S)
        assert f.residual <= 1e-9
        np.testing.assert_allclose(f.projection(), S.matrix, atol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]), st.floats(0.0, 2.0))
    def test_residual_property(self, seed, n, scale):
        S = random_symplectic(n, np.random.default_rng(seed), scale=scale)
        f = factorize(S)
        assert np.max(np.abs(f.projection() - S.matrix)) <= 1e-9 * max(1.0, np.abs(S.matrix).max()) ** 2

    def test_inverse(self):
        S = random_symplectic(2, np.random.default_rng(1))
        fi = factorize(S).inverse()
        assert isinstance(fi, Factorization)
        np.testing.assert_allclose(fi.projection() @ S.matrix, np.eye(4), atol=1e-9)


class TestSampled:
    def test_grid_is_centered(self):
        x = grid_coords(8, 0.5)
        assert x[4] == 0.0 and x[0] == -2.0

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            SampledSignal(np.zeros(100), 0.1)
        with pytest.raises(ValueError):
            TimeFrequencyGrid(np.zeros((6, 6)), 0.1, 0.1)

    def test_delta_has_flat_spectrum(self):
        v = np.zeros(N, complex)
        v[N // 2] = 1.0
        a = np.abs(centered_dft(v, 0, DX))
        assert np.ptp(a) < 1e-15

    def test_dft_round_trip(self):
        f = random_bandlimited(np.random.default_rng(0))
        back = centered_idft(centered_dft(f.values, 0, DX), 0, 1 / (N * DX))
        np.testing.assert_allclose(back, f.values, atol=1e-13)


class TestApplyDiscrete:
    def test_fourier_against_oracle(self):
        fact = factorize(BlockSymplectic(omega(1)))
        out = apply_discrete(fact, sampled_g0())
        ref = evaluate_gaussian(apply_factorization_gaussian(fact, g0), out.x)
        assert np.linalg.norm(out.values - ref) / np.linalg.norm(ref) <= 1e-6
        assert out.dx == pytest.approx(1 / (N * DX))

    @pytest.mark.parametrize("seed", range(6))
    def test_free_against_oracle(self, seed):
        S = random_symplectic(1, np.random.default_rng(seed), scale=0.5)
        fact = factorize(S, balanced=True)
        out = apply_discrete(fact, sampled_g0())
        ref = evaluate_gaussian(apply_factorization_gaussian(fact, g0), out.x)
        assert phase_blind_compare(out.values, ref)[1] <= 1e-3

    @pytest.mark.parametrize("seed", range(4))
    def test_unitarity(self, seed):
        rng = np.random.default_rng(seed)
        f = random_bandlimited(rng)
        fact = factorize(random_symplectic(1, rng, scale=0.4), balanced=True)
        out = apply_discrete(fact, f)
        assert abs(out.norm() - f.norm()) / f.norm() <= 1e-6

    def test_spill_recorded(self):
        fact = factorize(BlockSymplectic([[6.0, 0.0], [0.0, 1 / 6]]))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = apply_discrete(fact, sampled_g0())
        assert out.meta["spill"] > 1e-6 and out.meta.get("truncated")
        assert any(issubclass(w.category, SpillWarning) for w in caught)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_discrete(factorize(random_symplectic(2, np.random.default_rng(0))), sampled_g0())

    def test_lagrange_option(self):
        fact = factorize(BlockSymplectic([[1.25, 0.0], [0.0, 0.8]]))
        ref = apply_discrete(fact, sampled_g0())
        lag = apply_discrete(fact, sampled_g0(), method="lagrange", order=8)
        assert np.linalg.norm(lag.values - ref.values) / np.linalg.norm(ref.values) < 1e-3


class TestLinearResample:
    def test_quarter_turn_2d(self):
        t = grid_coords(64, 1 / 4)
        X, Y = np.meshgrid(t, t, indexing="ij")
        v = np.exp(-np.pi * ((X - 0.5) ** 2 + 2 * Y**2))
        R = np.array([[0.0, -1.0], [1.0, 0.0]])
        out = linear_resample(v, 1 / 4, R)
        # v(R z) at z = (x, y) is v(-y, x)
        ref = np.exp(-np.pi * ((-Y - 0.5) ** 2 + 2 * X**2))
        assert np.max(np.abs(out - ref)) < 1e-12

    def test_general_2d(self):
        t = grid_coords(128, 1 / 8)
        X, Y = np.meshgrid(t, t, indexing="ij")
        fn = lambda x, y: np.exp(-np.pi * (x**2 + y**2) + 1j * x * y)  # noqa: E731
        M = np.array([[1.1, 0.3], [-0.2, 0.9]])
        out = linear_resample(fn(X, Y), 1 / 8, M)
        ref = np.sqrt(abs(np.linalg.det(M))) * fn(M[0, 0] * X + M[0, 1] * Y, M[1, 0] * X + M[1, 1] * Y)
        assert np.max(np.abs(out - ref)) < 1e-9


class TestPhaseBlind:
    def test_unit_phase(self):
        Y = np.random.default_rng(0).normal(size=16) + 0j
        a, r = phase_blind_compare(1j * Y, Y)
        assert a == pytest.approx(1j) and r < 1e-15

    def test_identical(self):
        Y = np.arange(1.0, 9.0)
        assert phase_blind_compare(Y, Y) == (pytest.approx(1.0), pytest.approx(0.0))

    def test_noise(self):
        rng = np.random.default_rng(1)
        Y = rng.normal(size=256) + 1j * rng.normal(size=256)
        X = Y + 1e-8 * rng.normal(size=256)
        assert phase_blind_compare(X, Y)[1] <= 1e-7

    def test_zero_input(self):
        with pytest.raises(ValueError):
            phase_blind_compare(np.zeros(4), np.ones(4))
