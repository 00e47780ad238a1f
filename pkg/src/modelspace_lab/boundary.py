"""Unit-circle boundary functions on uniform power-of-two grids.

A BoundaryFunction holds samples at the M-th roots of unity together with an
eagerly computed Fourier cache (frequencies in [-M/2, M/2)).  The boundary
inner product is the M-point trapezoid rule, which is exact for trigonometric
polynomials of combined degree below M; everything quadrature-backed controls
aliasing by doubling M until the result stabilizes (adaptive_grid).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class QuadratureControl:
    """Grid-doubling policy: start at initial_m, stop at max_m or rel_tol."""

    initial_m: int = 256
    max_m: int = 16384
    rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("initial_m", "max_m"):
            m = getattr(self, name)
            if m < 2 or m & (m - 1) != 0:
                raise ValueError(f"{name} must be a power of two >= 2, got {m}")
        if self.initial_m > self.max_m:
            raise ValueError(
                f"initial_m {self.initial_m} exceeds max_m {self.max_m}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")


class GridConvergenceError(RuntimeError):
    """Doubling reached max_m with successive values still moving."""

    def __init__(self, delta: float, max_m: int):
        self.delta = delta
        self.max_m = max_m
        super().__init__(
            f"grid doubling did not converge by M={max_m}; last delta {delta:.3e}")


def unit_grid(grid_size: int) -> np.ndarray:
    """The grid points exp(2 pi i k / M), k = 0..M-1."""
    _check_grid_size(grid_size)
    return np.exp(2j * np.pi * np.arange(grid_size) / grid_size)


def _check_grid_size(grid_size: int) -> None:
    if grid_size < 2 or grid_size & (grid_size - 1) != 0:
        raise ValueError(f"grid size must be a power of two >= 2, got {grid_size}")


class BoundaryFunction:
    """Samples of a function on the unit circle plus its Fourier cache.

    Parameters
    ----------
    samples : array_like
        Complex values at the M-th roots of unity, M a power of two.

    Notes
    -----
    The Fourier cache is computed once at construction;
    ``coefficient(k)`` addresses it by frequency, k in [-M/2, M/2).
    Instances are treated as immutable: arithmetic returns new objects.
    """

    __slots__ = ("samples", "grid_size", "fourier")

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-d, got shape {samples.shape}")
        _check_grid_size(samples.size)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite values")
        self.samples = samples
        self.grid_size = samples.size
        # standard FFT bin order; bins [M/2, M) hold frequencies k - M
        self.fourier = np.fft.fft(samples) / self.grid_size

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray],
                      grid_size: int) -> "BoundaryFunction":
        return cls(fn(unit_grid(grid_size)))

    @classmethod
    def from_coefficients(cls, coefficients: dict[int, complex],
                          grid_size: int) -> "BoundaryFunction":
        """Trigonometric polynomial from a frequency -> coefficient map."""
        _check_grid_size(grid_size)
        bins = np.zeros(grid_size, dtype=complex)
        for k, c in coefficients.items():
            k = int(k)
            if not -grid_size // 2 <= k < grid_size // 2:
                raise ValueError(
                    f"frequency {k} outside [-M/2, M/2) for M={grid_size}")
            bins[k % grid_size] = c
        return cls(np.fft.ifft(bins) * grid_size)

    @classmethod
    def constant(cls, value: complex, grid_size: int) -> "BoundaryFunction":
        return cls(np.full(grid_size, value, dtype=complex))

    def coefficient(self, k: int) -> complex:
        if not -self.grid_size // 2 <= k < self.grid_size // 2:
            raise ValueError(
                f"frequency {k} outside [-M/2, M/2) for M={self.grid_size}")
        return complex(self.fourier[k % self.grid_size])

    def analytic_coefficients(self) -> np.ndarray:
        """Coefficients at frequencies 0..M/2-1."""
        return self.fourier[: self.grid_size // 2].copy()

    def resample(self, grid_size: int) -> "BoundaryFunction":
        """Spectral resampling; exact both ways for band-limited data."""
        _check_grid_size(grid_size)
        if grid_size == self.grid_size:
            return self
        half_old = self.grid_size // 2
        half_new = grid_size // 2
        half = min(half_old, half_new)
        bins = np.zeros(grid_size, dtype=complex)
        for k in range(-half, half):
            bins[k % grid_size] = self.fourier[k % self.grid_size]
        return BoundaryFunction(np.fft.ifft(bins) * grid_size)

    def conj(self) -> "BoundaryFunction":
        return BoundaryFunction(np.conj(self.samples))

    def norm(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def _require_same_grid(self, other: "BoundaryFunction") -> None:
        if self.grid_size != other.grid_size:
            raise ValueError(
                f"grid mismatch: {self.grid_size} vs {other.grid_size}; "
                "resample explicitly before combining")

    def __add__(self, other):
        if isinstance(other, BoundaryFunction):
            self._require_same_grid(other)
            return BoundaryFunction(self.samples + other.samples)
        return BoundaryFunction(self.samples + complex(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, BoundaryFunction):
            self._require_same_grid(other)
            return BoundaryFunction(self.samples - other.samples)
        return BoundaryFunction(self.samples - complex(other))

    def __mul__(self, other):
        if isinstance(other, BoundaryFunction):
            self._require_same_grid(other)
            return BoundaryFunction(self.samples * other.samples)
        return BoundaryFunction(self.samples * complex(other))

    __rmul__ = __mul__


def inner_product(f: BoundaryFunction, g: BoundaryFunction) -> complex:
    """Trapezoid boundary pairing (1/M) sum f(zeta) conj(g(zeta)).

    Exact for trigonometric polynomials whose combined degree stays below M;
    grids must match (resample first otherwise).
    """
    f._require_same_grid(g)
    return complex(np.vdot(g.samples, f.samples) / f.grid_size)


def cauchy_project(f: BoundaryFunction) -> BoundaryFunction:
    """Analytic (Riesz) projection: keep frequencies k >= 0."""
    m = f.grid_size
    bins = f.fourier.copy()
    bins[m // 2:] = 0.0  # bins at and above M/2 hold the negative frequencies
    return BoundaryFunction(np.fft.ifft(bins) * m)


def antianalytic_project(f: BoundaryFunction,
                         include_constant: bool = False) -> BoundaryFunction:
    """Co-analytic part: frequencies k < 0, optionally keeping k = 0.

    The default (constants excluded) matches the Hankel operator convention;
    include_constant=True matches the bilinear-form convention.
    """
    m = f.grid_size
    bins = np.zeros(m, dtype=complex)
    bins[m // 2:] = f.fourier[m // 2:]
    if include_constant:
        bins[0] = f.fourier[0]
    return BoundaryFunction(np.fft.ifft(bins) * m)


def eval_in_disk(f: BoundaryFunction, w: complex, deriv_order: int = 0) -> complex:
    """Value or derivative of the analytic part at an interior point.

    Sums the cached nonnegative-frequency coefficients against powers of w;
    the geometric tail converges for |w| < 1.
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError(f"evaluation point must be inside the disk, |w|={abs(w):.6f}")
    if deriv_order < 0:
        raise ValueError(f"derivative order must be >= 0, got {deriv_order}")
    coeffs = f.analytic_coefficients()
    k = np.arange(coeffs.size, dtype=float)
    weights = np.ones_like(k)
    for i in range(deriv_order):
        weights *= k - i
    active = k >= deriv_order
    powers = np.zeros_like(coeffs)
    powers[active] = w ** (k[active] - deriv_order)
    return complex(np.sum(coeffs * weights * powers))


def adaptive_grid(control: QuadratureControl,
                  computation: Callable[[int], object]) -> tuple[object, int]:
    """Run a grid-parameterized computation with doubling until stable.

    Returns (value, final_m) where final_m is the smallest grid whose result
    agrees with its doubling within control.rel_tol (relative to the larger
    of the two magnitudes and 1.0); the returned value is the doubled-grid
    evaluation.  Scalar and ndarray values are both accepted.  Raises
    GridConvergenceError with the last delta if max_m is reached while the
    values still move; if initial_m == max_m the single evaluation is
    returned uncertified.
    """
    m = control.initial_m
    previous = computation(m)
    if m == control.max_m:
        return previous, m
    while 2 * m <= control.max_m:
        current = computation(2 * m)
        delta = float(np.max(np.abs(np.asarray(current) - np.asarray(previous))))
        scale = max(float(np.max(np.abs(np.asarray(current)))),
                    float(np.max(np.abs(np.asarray(previous)))), 1.0)
        if delta <= control.rel_tol * scale:
            return current, m
        m *= 2
        previous = current
    raise GridConvergenceError(delta, control.max_m)
