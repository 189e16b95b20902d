import os
import subprocess
import sys

import numpy as np
import pytest

from mtfa import kernels

HAVE_COMPILED = True
try:
    kernels.get_impl("cython")
except RuntimeError:
    HAVE_COMPILED = False

BACKENDS = ["numpy"] + (["cython"] if HAVE_COMPILED else [])


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("order", [2, 5, 8])
def test_lagrange_exact_on_polynomials(backend, order):
    N = 40
    j = np.arange(N, dtype=float)
    coef = np.random.default_rng(order).normal(size=order)
    data = np.polyval(coef, j / N)[None, :] * (1 + 0.5j)
    pos = np.linspace(order, N - order - 1, 17)[None, :]
    out = kernels.lagrange_resample_rows(data, pos, order, backend=backend)
    np.testing.assert_allclose(out, np.polyval(coef, pos / N) * (1 + 0.5j), atol=1e-10)


@pytest.mark.parametrize("backend", BACKENDS)
def test_lagrange_hits_nodes(backend):
    data = np.random.default_rng(0).normal(size=(3, 32)) + 0j
    pos = np.tile(np.arange(32, dtype=float), (3, 1))
    np.testing.assert_allclose(kernels.lagrange_resample_rows(data, pos, 8, backend=backend), data, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_ndft_matches_fft(backend):
    N = 64
    data = np.random.default_rng(1).normal(size=(4, N)) + 1j * np.random.default_rng(2).normal(size=(4, N))
    out = kernels.ndft_rows(data, np.arange(N) / N, np.arange(N), backend=backend)
    np.testing.assert_allclose(out, np.fft.fft(data, axis=1), atol=1e-10)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")
def test_backends_agree():
    rng = np.random.default_rng(3)
    data = rng.normal(size=(50, 128)) + 1j * rng.normal(size=(50, 128))
    pos = rng.uniform(-2, 130, size=(50, 77))
    a = kernels.lagrange_resample_rows(data, pos, 8, backend="numpy")
    b = kernels.lagrange_resample_rows(data, pos, 8, backend="cython")
    np.testing.assert_allclose(a, b, atol=1e-12)
    x, fr = rng.uniform(-4, 4, 128), rng.uniform(-8, 8, 33)
    np.testing.assert_allclose(kernels.ndft_rows(data, x, fr, backend="numpy"),
                               kernels.ndft_rows(data, x, fr, backend="cython"), atol=1e-9)


def test_bad_order():
    with pytest.raises(ValueError):
        kernels.lagrange_resample_rows(np.zeros((1, 8)), np.zeros((1, 2)), 0, backend="numpy")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_impl("fortran")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("MTFA_THREADS", "3")
    assert kernels.threads() == 3
    monkeypatch.setenv("MTFA_THREADS", "junk")
    assert kernels.threads() >= 1


def test_pure_python_switch():
    env = {**os.environ, "MTFA_PURE_PYTHON": "1"}
    res = subprocess.run([sys.executable, "-c", "import mtfa; print(mtfa.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert res.stdout.strip() == "numpy"
