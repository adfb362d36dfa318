"""Backend equivalence: the jit kernels must match the numpy fallbacks."""

import numpy as np
import pytest

from bilmult import _kernels as K


def _random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable")


@needs_numba
def test_dft_points_backends_agree():
    rng = np.random.default_rng(101)
    for _ in range(5):
        n = int(rng.integers(5, 400))
        samples = _random_complex(rng, n)
        freqs = np.sort(rng.uniform(-10, 10, size=int(rng.integers(3, 120))))
        a = K.dft_points_numba(samples, -1.5, 0.01, freqs)
        b = K.dft_points_numpy(samples, -1.5, 0.01, freqs)
        assert np.max(np.abs(a - b)) < 1e-11 * max(1.0, np.abs(b).max())


@needs_numba
def test_synth_1d_backends_agree():
    rng = np.random.default_rng(103)
    w = _random_complex(rng, 200)
    xi = np.linspace(-5, 5, 200)
    xs = rng.uniform(-3, 3, size=150)
    a = K.synth_1d_numba(w, xi, xs)
    b = K.synth_1d_numpy(w, xi, xs)
    assert np.max(np.abs(a - b)) < 1e-10 * max(1.0, np.abs(b).max())


@needs_numba
def test_synth_2d_backends_agree():
    rng = np.random.default_rng(107)
    fw = _random_complex(rng, 40)
    gw = _random_complex(rng, 30)
    mv = _random_complex(rng, 40, 30)
    xi = np.linspace(-2, 2, 40)
    eta = np.linspace(-1, 1, 30)
    xs = rng.uniform(-2, 2, size=64)
    a = K.synth_2d_numba(fw, gw, mv, xi, eta, xs)
    b = K.synth_2d_numpy(fw, gw, mv, xi, eta, xs)
    assert np.max(np.abs(a - b)) < 1e-10 * max(1.0, np.abs(b).max())


@needs_numba
def test_pm_convolve_backends_agree():
    rng = np.random.default_rng(109)
    a_ = _random_complex(rng, 25)
    b_ = _random_complex(rng, 17)
    mv = _random_complex(rng, 25, 17)
    a = K.pm_convolve_numba(a_, b_, mv)
    b = K.pm_convolve_numpy(a_, b_, mv)
    assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.abs(b).max())


def test_numpy_chunking_consistent(monkeypatch):
    # force several chunks through the fallback paths
    rng = np.random.default_rng(113)
    samples = _random_complex(rng, 300)
    freqs = np.linspace(-4, 4, 90)
    whole = K.dft_points_numpy(samples, 0.0, 0.005, freqs)
    monkeypatch.setattr(K, "_CHUNK_ENTRIES", 1024)
    chunked = K.dft_points_numpy(samples, 0.0, 0.005, freqs)
    assert np.array_equal(whole, chunked)

    fw = _random_complex(rng, 32)
    gw = _random_complex(rng, 24)
    mv = _random_complex(rng, 32, 24)
    xi = np.linspace(-2, 2, 32)
    eta = np.linspace(-1, 1, 24)
    xs = rng.uniform(-1, 1, size=75)
    monkeypatch.setattr(K, "_CHUNK_ENTRIES", 4_000_000)
    whole = K.synth_2d_numpy(fw, gw, mv, xi, eta, xs)
    monkeypatch.setattr(K, "_CHUNK_ENTRIES", 512)
    chunked = K.synth_2d_numpy(fw, gw, mv, xi, eta, xs)
    assert np.max(np.abs(whole - chunked)) < 1e-12


def test_pm_convolve_oracle_full_convolution():
    rng = np.random.default_rng(127)
    a = _random_complex(rng, 9)
    b = _random_complex(rng, 6)
    ones = np.ones((9, 6), dtype=np.complex128)
    got = K.pm_convolve(a, b, ones)
    want = np.convolve(a, b)
    assert np.max(np.abs(got - want)) < 1e-12


def test_backend_flag_reporting():
    assert K.BACKEND in ("numba", "numpy")
    if K.BACKEND == "numba":
        assert K.HAVE_NUMBA
