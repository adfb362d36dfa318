"""Function representations on the line and on the torus.

Line functions are uniform-grid step functions with compact support.  A
:class:`SampledFunction` holds one complex value per cell of width ``dx``
and vanishes outside ``[x0, x0 + n*dx)``.  Every measure-theoretic query
downstream (distribution function, rearrangement, Lorentz norms) treats the
cells as exact, so norms are closed forms rather than quadratures.  Smooth
generators are sampled at cell midpoints; the step extension and the smooth
function then agree exactly on the midpoint grid.

Torus functions are trigonometric polynomials with finitely many Fourier
coefficients.  Evaluation reduces the argument mod 1 before any phase is
computed, so 1-periodicity is structural rather than a floating-point
accident.

Fourier convention: ``fhat(xi) = integral f(x) exp(-2 pi i x xi) dx`` and
synthesis carries ``exp(+2 pi i ...)``.  The bilinear synthesis kernels in
:mod:`bilmult.operators` are written against this choice; do not change one
without the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "GridSpec",
    "SampledFunction",
    "TrigPolynomial",
    "build_sampled",
    "build_trigpoly",
    "eval_trigpoly",
    "sample_on_torus",
    "named_function",
    "NAMED_FUNCTIONS",
]

DEFAULT_RADIUS = 8.0
DEFAULT_CELLS_PER_UNIT = 64
DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell grid: n cells of width dx starting at x0."""

    n: int
    x0: float
    dx: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 cells, got {self.n}")
        if not (self.dx > 0.0 and math.isfinite(self.dx)):
            raise ValueError(f"cell width must be positive and finite, got {self.dx}")
        if not math.isfinite(self.x0):
            raise ValueError("grid origin must be finite")

    @property
    def x_end(self) -> float:
        return self.x0 + self.n * self.dx

    def midpoints(self) -> np.ndarray:
        return self.x0 + self.dx * (np.arange(self.n) + 0.5)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampledFunction:
    """Step function on the line: value ``samples[i]`` on cell i, 0 outside."""

    samples: np.ndarray
    x0: float
    dx: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a nonempty 1-d array")
        if not np.all(np.isfinite(samples.real)) or not np.all(np.isfinite(samples.imag)):
            raise ValueError("non-finite sample values")
        if not (self.dx > 0.0 and math.isfinite(self.dx)) or not math.isfinite(self.x0):
            raise ValueError("invalid grid metadata")
        object.__setattr__(self, "samples", _freeze(samples))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def x_end(self) -> float:
        return self.x0 + self.n * self.dx

    @property
    def support_measure(self) -> float:
        """Total measure of the cells on which the function is nonzero."""
        return self.dx * int(np.count_nonzero(self.samples))

    def grid(self) -> GridSpec:
        return GridSpec(self.n, self.x0, self.dx)

    def midpoints(self) -> np.ndarray:
        return self.x0 + self.dx * (np.arange(self.n) + 0.5)

    def value_at(self, x) -> np.ndarray | complex:
        """Step-extension value: sample of the cell containing x, 0 outside."""
        xa = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(xa).ravel()
        idx = np.floor((flat - self.x0) / self.dx).astype(np.int64)
        inside = (idx >= 0) & (idx < self.n)
        out = np.zeros(flat.shape, dtype=np.complex128)
        out[inside] = self.samples[idx[inside]]
        if np.isscalar(x) or xa.ndim == 0:
            return complex(out[0])
        return out.reshape(xa.shape)

    def integral(self) -> complex:
        return complex(self.dx * self.samples.sum())

    def abs_integral(self) -> float:
        # compensated summation: magnitudes vary over many orders for the
        # Gaussian generators and plain left-to-right accumulation drifts
        return self.dx * math.fsum(np.abs(self.samples).tolist())

    def scale(self, c: complex) -> "SampledFunction":
        return SampledFunction(self.samples * c, self.x0, self.dx)


def build_sampled(values, grid: GridSpec) -> SampledFunction:
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} sample values, got shape {values.shape}")
    return SampledFunction(values, grid.x0, grid.dx)


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite Fourier sum sum_{|k| <= degree} a_k e^{2 pi i k theta} on the torus.

    Coefficients are stored densely over the window [-degree, degree];
    ``coeff_array[degree + k]`` is a_k.
    """

    coeff_array: np.ndarray
    degree: int = field(default=-1)

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeff_array, dtype=np.complex128)
        if arr.ndim != 1 or arr.size % 2 != 1:
            raise ValueError("coefficient array must have odd length 2*degree+1")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("non-finite coefficient")
        deg = (arr.size - 1) // 2
        object.__setattr__(self, "coeff_array", _freeze(arr))
        object.__setattr__(self, "degree", deg)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0.0 + 0.0j
        return complex(self.coeff_array[self.degree + k])

    def coeffs(self) -> dict[int, complex]:
        """Sparse view: only the nonzero coefficients."""
        out = {}
        for k, a in zip(self.frequencies, self.coeff_array):
            if a != 0:
                out[int(k)] = complex(a)
        return out

    def coeff_l1(self) -> float:
        return float(np.abs(self.coeff_array).sum())

    def trimmed(self) -> "TrigPolynomial":
        """Drop zero coefficients at both window ends."""
        arr = self.coeff_array
        nz = np.nonzero(arr)[0]
        if nz.size == 0:
            return TrigPolynomial(np.zeros(1, dtype=np.complex128))
        deg = int(max(abs(nz.min() - self.degree), abs(nz.max() - self.degree)))
        lo = self.degree - deg
        return TrigPolynomial(arr[lo : lo + 2 * deg + 1])


def build_trigpoly(coeffs: Mapping[int, complex]) -> TrigPolynomial:
    if not coeffs:
        return TrigPolynomial(np.zeros(1, dtype=np.complex128))
    degree = max(abs(int(k)) for k in coeffs)
    arr = np.zeros(2 * degree + 1, dtype=np.complex128)
    for k, a in coeffs.items():
        a = complex(a)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError(f"non-finite coefficient at k={k}")
        arr[degree + int(k)] = a
    return TrigPolynomial(arr)


def eval_trigpoly(f: TrigPolynomial, theta) -> np.ndarray | complex:
    """Evaluate on the torus; the argument is reduced mod 1 first."""
    th = np.asarray(theta, dtype=np.float64)
    thr = th - np.floor(th)
    phases = np.exp(2j * np.pi * np.outer(np.atleast_1d(thr).ravel(), f.frequencies))
    vals = phases @ f.coeff_array
    if np.isscalar(theta) or th.ndim == 0:
        return complex(vals[0])
    return vals.reshape(th.shape)


def sample_on_torus(f: TrigPolynomial, n: int) -> SampledFunction:
    """Sample f at the n cell midpoints of the fundamental domain [-1/2, 1/2).

    The result is a torus step function: n cells of width 1/n.  Sampling is
    exact for every n (aliased frequencies are evaluated, not dropped); it is
    done through one FFT after folding coefficients into residue classes.
    """
    if n < 2:
        raise ValueError("need at least 2 sample cells")
    k = f.frequencies
    theta0 = -0.5 + 0.5 / n
    twiddle = f.coeff_array * np.exp(2j * np.pi * k * theta0)
    bins = np.zeros(n, dtype=np.complex128)
    np.add.at(bins, np.mod(k, n), twiddle)
    vals = n * np.fft.ifft(bins)
    return SampledFunction(vals, -0.5, 1.0 / n)


# ---------------------------------------------------------------------------
# named generators


def _sym_grid(radius: float, cells_per_unit: int) -> GridSpec:
    half = int(math.ceil(radius * cells_per_unit))
    n = 2 * half
    dx = 1.0 / cells_per_unit
    return GridSpec(n, -half * dx, dx)


def _gaussian_tail(radius: float, scale: float) -> float:
    # integral of exp(-(x/scale)^2) over |x| > radius
    return scale * math.sqrt(math.pi) * math.erfc(radius / scale)


def _make_box_phi(cells_per_unit: int, radius: float, tail_tol: float, params):
    # indicator of [-1/2, 1/2]; the radius argument is ignored, the support
    # is part of the definition
    n = int(cells_per_unit)
    if n < 2:
        raise ValueError("box_phi needs at least 2 cells")
    grid = GridSpec(n, -0.5, 1.0 / n)
    return build_sampled(np.ones(n), grid)


def _make_gauss_psi(cells_per_unit, radius, tail_tol, params):
    tail = _gaussian_tail(radius, 1.0) / math.sqrt(math.pi)
    if tail > tail_tol:
        raise ValueError(
            f"truncation radius {radius} leaves tail mass {tail:.3e} > {tail_tol:.3e}"
        )
    grid = _sym_grid(radius, cells_per_unit)
    x = grid.midpoints()
    return build_sampled(np.exp(-x * x) / math.sqrt(math.pi), grid)


def _make_gauss_psi_check(cells_per_unit, radius, tail_tol, params):
    # inverse Fourier transform of gauss_psi: x -> exp(-pi^2 x^2)
    tail = _gaussian_tail(radius, 1.0 / math.pi)
    if tail > tail_tol:
        raise ValueError(
            f"truncation radius {radius} leaves tail mass {tail:.3e} > {tail_tol:.3e}"
        )
    grid = _sym_grid(radius, cells_per_unit)
    x = grid.midpoints()
    return build_sampled(np.exp(-(math.pi**2) * x * x), grid)


def _make_bump(cells_per_unit, radius, tail_tol, params):
    # smooth bump supported on [-radius, radius], peak value 1 at the origin
    grid = _sym_grid(radius, cells_per_unit)
    x = grid.midpoints() / radius
    vals = np.zeros(grid.n)
    inside = np.abs(x) < 1.0
    vals[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return build_sampled(vals, grid)


def _make_custom_gaussian(cells_per_unit, radius, tail_tol, params):
    sigma = float(params.get("sigma", 1.0))
    center = float(params.get("center", 0.0))
    amplitude = complex(params.get("amplitude", 1.0))
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    eff = radius - abs(center)
    if eff <= 0 or abs(amplitude) * _gaussian_tail(eff, sigma) > tail_tol:
        raise ValueError("truncation radius too small for requested gaussian")
    grid = _sym_grid(radius, cells_per_unit)
    x = grid.midpoints()
    return build_sampled(amplitude * np.exp(-(((x - center) / sigma) ** 2)), grid)


NAMED_FUNCTIONS = {
    "box_phi": _make_box_phi,
    "gauss_psi": _make_gauss_psi,
    "gauss_psi_check": _make_gauss_psi_check,
    "bump": _make_bump,
    "custom_gaussian": _make_custom_gaussian,
}


def named_function(
    name: str,
    *,
    cells_per_unit: int = DEFAULT_CELLS_PER_UNIT,
    radius: float = DEFAULT_RADIUS,
    tail_tol: float = DEFAULT_TAIL_TOL,
    **params,
) -> SampledFunction:
    """Build one of the named generators as a midpoint-sampled step function.

    box_phi          indicator of [-1/2, 1/2] (exact cells, radius ignored)
    gauss_psi        pi^{-1/2} exp(-x^2), unit mass
    gauss_psi_check  exp(-pi^2 x^2), the inverse transform of gauss_psi
    bump             C^inf bump supported on [-radius, radius], peak 1
    custom_gaussian  amplitude * exp(-((x-center)/sigma)^2)

    Truncated tails are checked against ``tail_tol``; a radius that cuts off
    visible mass raises instead of silently degrading downstream norms.
    """
    try:
        maker = NAMED_FUNCTIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown named function {name!r}; available: {sorted(NAMED_FUNCTIONS)}"
        ) from None
    if cells_per_unit < 2:
        raise ValueError("cells_per_unit must be at least 2")
    if radius <= 0:
        raise ValueError("radius must be positive")
    return maker(int(cells_per_unit), float(radius), float(tail_tol), params)
