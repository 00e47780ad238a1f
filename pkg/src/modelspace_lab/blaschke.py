"""Finite Blaschke products: normalized factors, zero families, separation.

Factors are normalized so that b_a(0) = |a| for a != 0 and b_0(z) = z;
products of these generate the inner functions whose model spaces the rest of
the package studies.  Zero generators produce the standard test families:
geometric radial approach (interpolating), super-geometric approach (thin),
angular spokes, and seeded uniform draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryFunction, unit_grid
from .rng import SplitMix64

# Largest radius representable strictly inside the disk with headroom; the
# boundary-approaching generators clamp here.  Directly parameterized
# generators keep the stricter desk-scale policy radius.
FLOAT_EDGE_RADIUS = 1.0 - 2.0 ** -52
POLICY_RADIUS = 0.99


@dataclass(frozen=True)
class BlaschkeSpec:
    """Zero list of a finite Blaschke product; order fixes the basis order."""

    zeros: tuple[complex, ...]

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        object.__setattr__(self, "zeros", zs)
        if not zs:
            raise ValueError("a Blaschke product needs at least one zero")
        for i, z in enumerate(zs):
            if not np.isfinite(z.real) or not np.isfinite(z.imag):
                raise ValueError(f"zero {i} is not finite: {z}")
            if abs(z) >= 1.0:
                raise ValueError(
                    f"zero {i} has modulus {abs(z):.17g} >= 1; "
                    "zeros must lie strictly inside the disk")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def simple_zeros(self) -> bool:
        return len(set(self.zeros)) == len(self.zeros)

    def squared(self) -> "BlaschkeSpec":
        """Spec of u^2: every zero doubled (second copy appended)."""
        return BlaschkeSpec(self.zeros + self.zeros)

    def require_simple(self, operation: str) -> None:
        if not self.simple_zeros:
            raise ValueError(f"{operation} requires simple zeros")


def one_minus_conj_prod(a: complex, z) -> complex | np.ndarray:
    """1 - conj(a) z through the gap form (1-conj(a)) + conj(a)(1-z).

    For nearby real points at the float64 edge both gaps are exact
    (Sterbenz), so kernel denominators keep full relative accuracy where the
    naive product 1 - conj(a)*z would lose it.
    """
    ac = complex(np.conj(a))
    return (1.0 - ac) + ac * (1.0 - z)


def factor_eval(a: complex, z, stable: bool = False):
    """One normalized Blaschke factor at z (scalar or array)."""
    if a == 0:
        return np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    ac = np.conj(a)
    denom = one_minus_conj_prod(a, z) if stable else 1.0 - ac * np.asarray(z, dtype=complex)
    return (-ac / abs(a)) * (np.asarray(z, dtype=complex) - a) / denom


def blaschke_eval(spec: BlaschkeSpec, z, omit_index: int | None = None,
                  stable: bool = False):
    """Product of factors at z; omit_index drops one factor (u_n)."""
    if omit_index is not None and not 0 <= omit_index < spec.degree:
        raise ValueError(f"omit_index {omit_index} out of range for degree {spec.degree}")
    scalar = np.ndim(z) == 0
    result = np.ones(1 if scalar else np.shape(z), dtype=complex)
    for i, a in enumerate(spec.zeros):
        if i == omit_index:
            continue
        result = result * factor_eval(a, z, stable=stable)
    return complex(result[0]) if scalar else result


def boundary_function(spec: BlaschkeSpec, grid_size: int) -> BoundaryFunction:
    """u sampled on the boundary grid."""
    return BoundaryFunction(blaschke_eval(spec, unit_grid(grid_size)))


def separation_profile(spec: BlaschkeSpec) -> np.ndarray:
    """delta_n = prod_{i != n} |b_i(z_n)|; requires simple zeros.

    A single zero gives the empty product 1.  Values are computed with the
    gap-stable factor form so exponentially close real pairs keep relative
    accuracy.
    """
    spec.require_simple("separation_profile")
    deltas = np.empty(spec.degree)
    for n, zn in enumerate(spec.zeros):
        deltas[n] = abs(blaschke_eval(spec, zn, omit_index=n, stable=True))
    return deltas


def radial_exponential(c: float, count: int) -> BlaschkeSpec:
    """r_k = 1 - c^k on the positive axis; interpolating, delta floor in N."""
    if not 0.0 < c < 1.0:
        raise ValueError(f"radialExponential ratio must be in (0, 1), got {c}")
    return _radial_family([1.0 - c ** k for k in range(1, count + 1)], "radialExponential")


def thin(base: float, count: int) -> BlaschkeSpec:
    """r_k = 1 - base^(k^2); trailing separations approach 1."""
    if not 0.0 < base < 1.0:
        raise ValueError(f"thin base must be in (0, 1), got {base}")
    return _radial_family([1.0 - base ** (k * k) for k in range(1, count + 1)], "thin")


def _radial_family(radii: list[float], kind: str) -> BlaschkeSpec:
    clamped = [min(r, FLOAT_EDGE_RADIUS) for r in radii]
    if len(set(clamped)) != len(clamped):
        raise ValueError(
            f"{kind} radii collide at the float64 edge for count {len(radii)}; "
            "reduce the count")
    return BlaschkeSpec(tuple(complex(r) for r in clamped))


def spokes(rays: int, radii: list[float], count: int | None = None) -> BlaschkeSpec:
    """Zeros on equally spaced rays at the given radii, radius-major order."""
    if rays < 1:
        raise ValueError(f"spokes needs at least one ray, got {rays}")
    if not radii:
        raise ValueError("spokes needs at least one radius")
    for r in radii:
        if not 0.0 < r <= POLICY_RADIUS:
            raise ValueError(
                f"spokes radius {r} outside (0, {POLICY_RADIUS}] policy range")
    points = [r * np.exp(2j * np.pi * j / rays)
              for r in radii for j in range(rays)]
    if count is not None:
        if count > len(points):
            raise ValueError(
                f"spokes grid has {len(points)} points, cannot take {count}")
        points = points[:count]
    return BlaschkeSpec(tuple(points))


def random_disk(seed: int, count: int, max_radius: float = 0.9) -> BlaschkeSpec:
    """Seeded uniform draws from a centered disk; deterministic in the seed."""
    if not 0.0 < max_radius <= POLICY_RADIUS:
        raise ValueError(
            f"randomDisk max_radius {max_radius} outside (0, {POLICY_RADIUS}]")
    stream = SplitMix64(seed).derive("randomDisk")
    return BlaschkeSpec(tuple(stream.unit_disk(max_radius) for _ in range(count)))


def generate_zeros(kind: str, count: int, **params) -> BlaschkeSpec:
    """Dispatch for the named zero families (config-facing)."""
    if count < 1:
        raise ValueError(f"zero count must be >= 1, got {count}")
    if kind == "radialExponential":
        spec = radial_exponential(params.pop("c", 0.5), count)
    elif kind == "thin":
        spec = thin(params.pop("base", 0.5), count)
    elif kind == "spokes":
        spec = spokes(params.pop("rays", 4), list(params.pop("radii", [0.5])), count)
    elif kind == "randomDisk":
        spec = random_disk(params.pop("seed", 1), count, params.pop("maxRadius", 0.9))
    else:
        raise ValueError(f"unknown zero family {kind!r}; expected radialExponential, "
                         "thin, spokes, or randomDisk")
    if params:
        raise ValueError(f"unknown parameters for {kind}: {sorted(params)}")
    return spec
