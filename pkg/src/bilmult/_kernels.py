"""Hot numeric kernels, with numba acceleration and a pure-numpy fallback.

The backend is chosen once at import time:

* ``BILMULT_DISABLE_NUMBA`` set to anything but ``0`` forces the numpy path,
* ``NUMBA_DISABLE_JIT`` (numba's own switch) likewise,
* a missing numba install falls back silently.

Both implementations stay importable (``synth_2d_numpy`` vs
``synth_2d_numba``) so the equivalence tests and ``benchmarks/`` can compare
them; the undecorated public names point at the selected backend.

All kernels work on plain contiguous arrays.  Sample abscissae are cell
midpoints ``x0 + dx*(i + 1/2)``; that convention is shared with funcspace
and must not drift.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "dft_points",
    "synth_1d",
    "synth_2d",
    "pm_convolve",
]

# Cap on the number of complex entries materialised at once by the numpy
# fallbacks (phase-matrix chunking).  64 MB of complex128 per chunk.
_CHUNK_ENTRIES = 4_000_000


def _numba_wanted() -> bool:
    if os.environ.get("BILMULT_DISABLE_NUMBA", "0") not in ("", "0"):
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", "0") not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


HAVE_NUMBA = _numba_wanted()


# ---------------------------------------------------------------------------
# numpy reference implementations


def dft_points_numpy(samples, x0, dx, freqs):
    """dx * sum_i samples[i] * exp(-2 pi i x_i freq) at each requested freq."""
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    x = x0 + dx * (np.arange(samples.size) + 0.5)
    out = np.empty(freqs.size, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(samples.size, 1))
    for lo in range(0, freqs.size, step):
        block = freqs[lo : lo + step]
        out[lo : lo + step] = np.exp(-2j * np.pi * np.outer(block, x)) @ samples
    return dx * out


def synth_1d_numpy(weights, xi, xs):
    """sum_a weights[a] * exp(+2 pi i xi_a x) at each x."""
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty(xs.size, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(xi.size, 1))
    for lo in range(0, xs.size, step):
        block = xs[lo : lo + step]
        out[lo : lo + step] = np.exp(2j * np.pi * np.outer(block, xi)) @ weights
    return out


def synth_2d_numpy(fw, gw, mvals, xi, eta, xs):
    """Double frequency sum sum_{a,b} fw_a mvals_ab gw_b e^{2 pi i (xi_a+eta_b) x}.

    Contracted as (mvals^T @ phase_xi) * phase_eta summed over b, which keeps
    the intermediate at B x J instead of A x B x J.
    """
    fw = np.ascontiguousarray(fw, dtype=np.complex128)
    gw = np.ascontiguousarray(gw, dtype=np.complex128)
    mvals = np.ascontiguousarray(mvals, dtype=np.complex128)
    out = np.empty(xs.size, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(xi.size + eta.size, 1))
    w = fw[:, None] * mvals * gw[None, :]
    for lo in range(0, xs.size, step):
        block = xs[lo : lo + step]
        p1 = np.exp(2j * np.pi * np.outer(xi, block))
        p2 = np.exp(2j * np.pi * np.outer(eta, block))
        out[lo : lo + step] = (w.T @ p1 * p2).sum(axis=0)
    return out


def pm_convolve_numpy(a, b, mvals):
    """out[i+j] += a[i] * b[j] * mvals[i, j] over the full index window."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    mvals = np.ascontiguousarray(mvals, dtype=np.complex128)
    na, nb = a.size, b.size
    out = np.zeros(na + nb - 1, dtype=np.complex128)
    terms = (a[:, None] * b[None, :]) * mvals
    idx = np.add.outer(np.arange(na), np.arange(nb))
    np.add.at(out, idx.ravel(), terms.ravel())
    return out


# ---------------------------------------------------------------------------
# numba twins

if HAVE_NUMBA:
    import cmath

    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def dft_points_numba(samples, x0, dx, freqs):  # pragma: no cover - jit
        n = samples.shape[0]
        m = freqs.shape[0]
        out = np.empty(m, np.complex128)
        for j in prange(m):
            w = -2.0 * np.pi * freqs[j]
            acc = 0.0 + 0.0j
            for i in range(n):
                acc += samples[i] * cmath.exp(1j * (w * (x0 + dx * (i + 0.5))))
            out[j] = dx * acc
        return out

    @njit(parallel=True, cache=True)
    def synth_1d_numba(weights, xi, xs):  # pragma: no cover - jit
        a = xi.shape[0]
        m = xs.shape[0]
        out = np.empty(m, np.complex128)
        for j in prange(m):
            w = 2.0 * np.pi * xs[j]
            acc = 0.0 + 0.0j
            for i in range(a):
                acc += weights[i] * cmath.exp(1j * (w * xi[i]))
            out[j] = acc
        return out

    @njit(parallel=True, cache=True)
    def synth_2d_numba(fw, gw, mvals, xi, eta, xs):  # pragma: no cover - jit
        na = xi.shape[0]
        nb = eta.shape[0]
        m = xs.shape[0]
        out = np.empty(m, np.complex128)
        for j in prange(m):
            x = xs[j]
            pg = np.empty(nb, np.complex128)
            for b in range(nb):
                pg[b] = gw[b] * cmath.exp(2j * np.pi * eta[b] * x)
            acc = 0.0 + 0.0j
            for a in range(na):
                inner = 0.0 + 0.0j
                for b in range(nb):
                    inner += mvals[a, b] * pg[b]
                acc += fw[a] * cmath.exp(2j * np.pi * xi[a] * x) * inner
            out[j] = acc
        return out

    @njit(cache=True)
    def pm_convolve_numba(a, b, mvals):  # pragma: no cover - jit
        na = a.shape[0]
        nb = b.shape[0]
        out = np.zeros(na + nb - 1, np.complex128)
        for i in range(na):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(nb):
                out[i + j] += ai * b[j] * mvals[i, j]
        return out

    def _c(arr):
        return np.ascontiguousarray(arr, dtype=np.complex128)

    def _f(arr):
        return np.ascontiguousarray(arr, dtype=np.float64)

    def dft_points(samples, x0, dx, freqs):
        return dft_points_numba(_c(samples), float(x0), float(dx), _f(freqs))

    def synth_1d(weights, xi, xs):
        return synth_1d_numba(_c(weights), _f(xi), _f(xs))

    def synth_2d(fw, gw, mvals, xi, eta, xs):
        return synth_2d_numba(_c(fw), _c(gw), _c(mvals), _f(xi), _f(eta), _f(xs))

    def pm_convolve(a, b, mvals):
        return pm_convolve_numba(_c(a), _c(b), _c(mvals))

    BACKEND = "numba"
else:
    dft_points = dft_points_numpy
    synth_1d = synth_1d_numpy
    synth_2d = synth_2d_numpy
    pm_convolve = pm_convolve_numpy
    BACKEND = "numpy"
