"""Time the numba kernels against their numpy fallbacks.

Run as ``python3 benchmarks/bench_kernels.py`` (add ``--repeats`` /
``--scale`` to taste).  Sizes default to the shapes the library actually
hits: banded quadrature for the line operator, coefficient convolution for
the torus operator, midpoint transforms for periodization.  Each case is
cross-checked before timing so a speedup never hides a wrong answer.
"""

import argparse
import time

import numpy as np

from bilmult import _kernels as K


def _best_of(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(scale, rng):
    n = int(4096 * scale)
    samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    freqs = np.linspace(-8.0, 8.0, n)
    yield "dft_points", (samples, -2.0, 4.0 / n, freqs)

    a = int(2048 * scale)
    m = int(4096 * scale)
    weights = rng.standard_normal(a) + 1j * rng.standard_normal(a)
    xi = np.linspace(-6.0, 6.0, a)
    xs = np.linspace(-12.0, 12.0, m)
    yield "synth_1d", (weights, xi, xs)

    band = int(256 * scale)
    pts = int(768 * scale)
    fw = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    gw = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    mv = rng.standard_normal((band, band)) + 0j
    grid = np.linspace(-6.0, 6.0, band)
    out = np.linspace(-12.0, 12.0, pts)
    yield "synth_2d", (fw, gw, mv, grid, grid, out)

    deg = int(129 * scale)
    ca = rng.standard_normal(deg) + 1j * rng.standard_normal(deg)
    cb = rng.standard_normal(deg) + 1j * rng.standard_normal(deg)
    mv2 = rng.standard_normal((deg, deg)) + 0j
    yield "pm_convolve", (ca, cb, mv2)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5, help="best-of timing repeats")
    ap.add_argument("--scale", type=float, default=1.0, help="multiplier on all sizes")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        print("numba backend unavailable (missing install or disabled by env);")
        print("timing the numpy fallback only.")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<12} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, case in _cases(args.scale, rng):
        np_fn = getattr(K, f"{name}_numpy")
        t_np = _best_of(np_fn, case, args.repeats)
        if K.HAVE_NUMBA:
            nb_fn = getattr(K, name)
            ref = np_fn(*case)
            got = nb_fn(*case)  # first call also pays the jit cost
            err = float(np.max(np.abs(got - ref)))
            if err > 1e-9 * max(1.0, float(np.max(np.abs(ref)))):
                raise SystemExit(f"{name}: backends disagree by {err:.3e}")
            t_nb = _best_of(nb_fn, case, args.repeats)
            print(f"{name:<12} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<12} {t_np * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
