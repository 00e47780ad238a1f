"""Analytic Besov norms and singular-value compactness evidence.

The Besov scale is the symbol side of the Schatten characterization: the
conjugated symbol lands in B_p exactly when the operator lands in S_p.  The
norm realized here is the derivative-order-n equivalent norm

    value^p = sum_{k<n} |f^(k)(0)|^p
            + int_D ((1-|z|^2)^n |f^(n)(z)|)^p dA(z) / (pi (1-|z|^2)^2),

valid for n > 1/p.  Only ratio boundedness is ever asserted against operator
norms; the absolute normalization is a choice among equivalent norms.

The invariant area measure piles its mass at the rim, so the radial
quadrature substitutes r = 1 - e^{-s} and takes midpoint rings in s; the
integrand then decays like e^{-(np-1)s} for symbols analytic across the
boundary and the span is sized to exhaust that tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryFunction
from .linalg import singular_values

# e^{-(np-1) span} ~ 1e-17 when (np-1) span = 40; capped so near-critical
# exponents still terminate.
_TAIL_EFOLDS = 40.0
_SPAN_CAP = 200.0


@dataclass(frozen=True)
class BesovEstimate:
    """B_p norm estimate with its quadrature provenance.

    ring_delta is the change from the half-ring evaluation (the doubling
    step that produced this value); diverged marks outer-ring contributions
    that never entered geometric decay, so the value is a truncation, not a
    norm.
    """

    p: float
    deriv_order: int
    value: float
    radial_rings: int
    angular_points: int
    ring_delta: float
    diverged: bool


def _derivative_coefficients(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Taylor coefficients of f^(n) from those of f."""
    j = np.arange(coeffs.size, dtype=float)
    falling = np.ones_like(j)
    for i in range(n):
        falling *= j - i
    return (coeffs * falling)[n:]


def _ring_integral(deriv: np.ndarray, p: float, n: int, rings: int,
                   angular: int) -> tuple[float, np.ndarray]:
    """Midpoint-in-s quadrature of the weighted area integral.

    Returns the integral and the per-ring contributions, outermost last.
    """
    exponent = n * p - 1.0
    span = min(_TAIL_EFOLDS / max(exponent, 0.2), _SPAN_CAP)
    ds = span / rings
    s = (np.arange(rings) + 0.5) * ds
    gap = np.exp(-s)
    r = 1.0 - gap
    if deriv.size == 0:
        return 0.0, np.zeros(rings)
    powers = r[:, None] ** np.arange(deriv.size)[None, :]
    padded = np.zeros((rings, angular), dtype=complex)
    padded[:, : deriv.size] = deriv[None, :] * powers
    samples = np.fft.ifft(padded, axis=-1) * angular
    angular_mean = np.mean(np.abs(samples) ** p, axis=-1)
    # 1 - r^2 written through the gap 1 - r = e^{-s}: the direct form
    # rounds to zero once r reaches the float64 edge
    weight = gap * (2.0 - gap)
    contributions = (2.0 * r * weight ** (n * p - 2.0) * angular_mean
                     * gap * ds)
    return float(np.sum(contributions)), contributions


def besov_norm(f: BoundaryFunction, p: float, n: int = 2,
               rings: int = 256) -> BesovEstimate:
    """Derivative-order-n Besov B_p norm of an analytic boundary function.

    Requires n > 1/p.  A divergent (or unresolved near-critical) integrand
    is reported through the diverged flag rather than an exception; the
    value is then the truncated quadrature.
    """
    p = float(p)
    if not p > 0.0:
        raise ValueError(f"Besov exponent must be positive, got {p}")
    if n < 1 or n * p <= 1.0:
        raise ValueError(
            f"derivative order {n} must exceed 1/p = {1.0 / p:.3g}")
    if rings < 2:
        raise ValueError(f"need at least 2 radial rings, got {rings}")
    scale = np.max(np.abs(f.fourier))
    anti = np.abs(f.fourier[f.grid_size // 2:])
    if anti.size and np.max(anti) > 1e-12 * max(1.0, float(scale)):
        raise ValueError("Besov norm requires an analytic symbol")
    coeffs = f.analytic_coefficients()
    head = sum(abs(math.factorial(k) * coeffs[k]) ** p
               for k in range(min(n, coeffs.size)))
    deriv = _derivative_coefficients(coeffs, n)
    integral, rows = _ring_integral(deriv, p, n, rings, f.grid_size)
    half_integral, _ = _ring_integral(deriv, p, n, max(rings // 2, 1),
                                      f.grid_size)
    value = (head + integral) ** (1.0 / p)
    previous = (head + half_integral) ** (1.0 / p)
    diverged = bool(rows[-1] > 0.0 and rows[-1] >= 0.99 * rows[-2])
    return BesovEstimate(p, int(n), float(value), int(rings),
                         int(f.grid_size), float(value - previous), diverged)


@dataclass(frozen=True)
class CompactnessProxy:
    """Singular-value decay across a size family; evidence only, no verdict.

    tail_fractions[i] = sum_{k >= tail_indices[i]} sigma_k^2 over
    sum_k sigma_k^2 for the i-th matrix, singular values descending.  With
    the default half-size cuts a compact trend shows as the fractions
    falling toward zero while a non-decaying family holds them level.
    """

    sizes: tuple[int, ...]
    singular_values: tuple[np.ndarray, ...]
    tail_indices: tuple[int, ...]
    tail_fractions: tuple[float, ...]


def compactness_proxy(matrices, tail_index: int | None = None) -> CompactnessProxy:
    """Spectra and tail mass of an increasing family of operator matrices.

    tail_index fixes one cut for every size; the default cuts each
    spectrum at half its own length.
    """
    mats = [np.asarray(getattr(m, "matrix", m), dtype=complex)
            for m in matrices]
    if not mats:
        raise ValueError("compactness proxy needs at least one matrix")
    for m in mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected square matrices, got shape {m.shape}")
    sizes = tuple(m.shape[0] for m in mats)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"family sizes must be increasing, got {sizes}")
    if tail_index is None:
        cuts = tuple(max(size // 2, 1) for size in sizes)
    else:
        cuts = tuple(int(tail_index) for _ in sizes)
    spectra = tuple(singular_values(m) for m in mats)
    fractions = []
    for sigma, cut in zip(spectra, cuts):
        total = float(np.sum(sigma ** 2))
        tail = float(np.sum(sigma[cut:] ** 2))
        fractions.append(tail / total if total > 0.0 else 0.0)
    return CompactnessProxy(sizes, spectra, cuts, tuple(fractions))
