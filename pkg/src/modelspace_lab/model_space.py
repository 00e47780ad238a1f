"""Model spaces of finite Blaschke products.

For u with zeros z_1..z_N (repetition allowed) the space K_u = H^2 - u H^2
is N dimensional.  This module builds its Takenaka-Malmquist orthonormal
basis on boundary grids, certifies orthonormality by quadrature, evaluates
reproducing kernels, projects onto K_u, applies the canonical conjugation
C f = u conj(z f), and inverts the kernel Gram for the dual basis at the
zeros.  Closed-form node-space data (kernel_gram, kernel_coordinates) is
exact in the zeros and independent of any boundary grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeSpec, blaschke_eval, factor_eval, one_minus_conj_prod
from .boundary import BoundaryFunction, QuadratureControl, unit_grid
from .linalg import singular_values


class GramCertificationError(RuntimeError):
    """Quadrature could not certify basis orthonormality within the grid cap."""

    def __init__(self, residual: float, grid_m: int):
        super().__init__(
            f"basis Gram residual {residual:.3e} not certified at grid {grid_m}")
        self.residual = residual
        self.grid_m = grid_m


def kernel_norm_at(spec: BlaschkeSpec, w: complex) -> float:
    """Norm of the reproducing kernel of K_u at w."""
    uw = blaschke_eval(spec, w)
    return float(np.sqrt((1.0 - abs(uw) ** 2) / ((1.0 - abs(w)) * (1.0 + abs(w)))))


def _zero_kernel_norms(spec: BlaschkeSpec) -> np.ndarray:
    # at a zero the kernel is the Cauchy kernel; (1-|z|)(1+|z|) avoids the
    # cancellation in 1-|z|^2 at edge radii
    moduli = np.abs(np.array(spec.zeros))
    return 1.0 / np.sqrt((1.0 - moduli) * (1.0 + moduli))


def tm_basis_samples(spec: BlaschkeSpec, grid_size: int) -> np.ndarray:
    """Takenaka-Malmquist basis sampled on the boundary grid, shape (N, M).

    e_n = b_1 ... b_{n-1} k_n / ||k_n|| with k_n the Cauchy kernel at z_n.
    Works for repeated zeros; zeros (0, 0) give the monomials 1, z.
    """
    return tm_basis_samples_window(spec, grid_size, 0, grid_size)


@dataclass
class ModelBasis:
    """Certified orthonormal basis; samples are regenerated per grid on demand."""

    spec: BlaschkeSpec
    grid_size: int
    gram_residual: float
    certified: bool
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.spec.degree

    def functions_at(self, grid_size: int | None = None) -> np.ndarray:
        m = self.grid_size if grid_size is None else grid_size
        if m not in self._cache:
            self._cache[m] = tm_basis_samples(self.spec, m)
        return self._cache[m]

    def function(self, n: int, grid_size: int | None = None) -> BoundaryFunction:
        return BoundaryFunction(self.functions_at(grid_size)[n])


def _gram_residual(samples: np.ndarray) -> float:
    n, m = samples.shape
    gram = (samples.conj() @ samples.T) / m
    return float(np.max(np.abs(gram - np.eye(n))))


def build_basis(spec: BlaschkeSpec, control: QuadratureControl | None = None,
                tolerance: float = 1e-10,
                require_certified: bool = True) -> ModelBasis:
    """Basis with quadrature-certified Gram: max |<e_i,e_j> - delta_ij| <= tol.

    Doubles the grid from control.initial_m to control.max_m.  Zeros very
    close to the boundary alias past any affordable grid; with
    require_certified=False the basis is still returned, flagged, with the
    achieved residual.
    """
    control = control or QuadratureControl()
    m = control.initial_m
    residual = np.inf
    while m <= control.max_m:
        residual = _gram_residual(tm_basis_samples(spec, m))
        if residual <= tolerance:
            return ModelBasis(spec, m, residual, True)
        m *= 2
    if require_certified:
        raise GramCertificationError(residual, control.max_m)
    return ModelBasis(spec, control.max_m, residual, False)


def certify_gram(spec: BlaschkeSpec, tolerance: float = 1e-10,
                 initial_m: int = 2 ** 13, max_m: int = 2 ** 22,
                 chunk: int = 2 ** 17) -> tuple[float, int]:
    """Chunk-streamed Gram certification for grids too large to hold at once.

    Trapezoid aliasing for a zero at radius r decays like r^M, so the search
    starts near M ~ 32/(1-r_max) and doubles until the residual clears the
    tolerance.  Returns (residual, grid_size) or raises on exhaustion.
    """
    gap = min((1.0 - abs(z)) * (1.0 + abs(z)) / 2.0 for z in spec.zeros)
    start = initial_m
    while start < max_m and start * gap < 32.0:
        start *= 2
    m = min(start, max_m)
    residual = np.inf
    while True:
        gram = np.zeros((spec.degree, spec.degree), dtype=complex)
        for lo in range(0, m, chunk):
            block = tm_basis_samples_window(spec, m, lo, min(lo + chunk, m))
            gram += block.conj() @ block.T
        residual = float(np.max(np.abs(gram / m - np.eye(spec.degree))))
        if residual <= tolerance:
            return residual, m
        if m >= max_m:
            raise GramCertificationError(residual, max_m)
        m *= 2


def tm_basis_samples_window(spec: BlaschkeSpec, grid_size: int,
                            lo: int, hi: int) -> np.ndarray:
    """Columns lo:hi of the (N, grid_size) sample matrix, without the rest."""
    zeta = np.exp(2j * np.pi * np.arange(lo, hi) / grid_size)
    norms = _zero_kernel_norms(spec)
    rows = np.empty((spec.degree, hi - lo), dtype=complex)
    prefix = np.ones(hi - lo, dtype=complex)
    for n, a in enumerate(spec.zeros):
        rows[n] = prefix / (norms[n] * (1.0 - np.conj(a) * zeta))
        prefix = prefix * factor_eval(a, zeta)
    return rows


@dataclass(frozen=True)
class KernelFunction:
    """Reproducing kernel at an anchor: boundary samples plus exact norm."""

    anchor: complex
    inner_value: complex  # generating inner function evaluated at the anchor
    boundary: BoundaryFunction
    norm: float


def kernel_at(spec: BlaschkeSpec, w: complex, grid_size: int,
              squared: bool = False) -> KernelFunction:
    """Kernel of K_u at w; squared=True gives the pointwise square k^2_{u,w}.

    The squared kernel generates the space in which the T transform lives;
    its norm is taken from the grid (no convenient closed form), the plain
    kernel norm is exact.
    """
    if abs(w) >= 1.0:
        raise ValueError(f"kernel anchor must lie inside the disk, got |w| = {abs(w)}")
    zeta = unit_grid(grid_size)
    u = blaschke_eval(spec, zeta)
    uw = blaschke_eval(spec, w)
    samples = (1.0 - np.conj(uw) * u) / (1.0 - np.conj(w) * zeta)
    if squared:
        boundary = BoundaryFunction(samples * samples)
        return KernelFunction(complex(w), complex(uw), boundary,
                              float(boundary.norm()))
    norm = float(np.sqrt((1.0 - abs(uw) ** 2) / ((1.0 - abs(w)) * (1.0 + abs(w)))))
    return KernelFunction(complex(w), complex(uw), BoundaryFunction(samples), norm)


def project_Ku(f: BoundaryFunction, basis: ModelBasis) -> np.ndarray:
    """Coefficients <f, e_n> of the K_u component of f."""
    funcs = basis.functions_at(f.grid_size)
    return (funcs.conj() @ f.samples) / f.grid_size


def synthesize(basis: ModelBasis, coeffs: np.ndarray,
               grid_size: int | None = None) -> BoundaryFunction:
    funcs = basis.functions_at(grid_size)
    return BoundaryFunction(np.asarray(coeffs, dtype=complex) @ funcs)


def pu_project(f: BoundaryFunction, basis: ModelBasis) -> BoundaryFunction:
    """P_u f as a boundary function on f's grid."""
    return synthesize(basis, project_Ku(f, basis), f.grid_size)


def pu_conj_project(f: BoundaryFunction, basis: ModelBasis) -> BoundaryFunction:
    """Projection onto conj(K_u) = {conj(g) : g in K_u}."""
    return pu_project(f.conj(), basis).conj()


def conjugation_C(f: BoundaryFunction, spec: BlaschkeSpec) -> BoundaryFunction:
    """C f = u conj(z f) on the boundary; conjugate-linear isometry of K_u."""
    zeta = unit_grid(f.grid_size)
    u = blaschke_eval(spec, zeta)
    return BoundaryFunction(u * np.conj(zeta * f.samples))


def kernel_gram(spec: BlaschkeSpec) -> np.ndarray:
    """G[i, j] = <khat_j, khat_i> for normalized kernels at the zeros.

    Closed form k_j(z_i) = 1/(1 - conj(z_j) z_i); the gap-stable product
    keeps relative accuracy for exponentially close radii.
    """
    spec.require_simple("kernel_gram")
    zs = spec.zeros
    norms = _zero_kernel_norms(spec)
    n = spec.degree
    gram = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            gram[i, j] = 1.0 / (one_minus_conj_prod(zs[j], zs[i]) * norms[i] * norms[j])
    return gram


def kernel_coordinates(spec: BlaschkeSpec) -> np.ndarray:
    """K[m, j] = <khat_j, e_m>: normalized-kernel coordinates in the basis.

    Upper triangular with K^H K = kernel_gram; columns are exact (closed
    form in the zeros), which is what makes node-space operator assembly
    independent of boundary quadrature.
    """
    spec.require_simple("kernel_coordinates")
    zs = np.array(spec.zeros)
    norms = _zero_kernel_norms(spec)
    n = spec.degree
    coords = np.zeros((n, n), dtype=complex)
    prefix = np.ones(n, dtype=complex)  # prefix[j] = prod_{i<m} b_i(z_j)
    for m_idx, a in enumerate(spec.zeros):
        kernel_vals = prefix / (norms[m_idx] * one_minus_conj_prod(a, zs))
        coords[m_idx] = np.conj(kernel_vals) / norms
        prefix = prefix * factor_eval(a, zs, stable=True)
    return coords


@dataclass(frozen=True)
class DualBasis:
    """h_n with <h_n, khat_m> = delta_nm, stored in normalized-kernel coordinates."""

    spec: BlaschkeSpec
    coefficients: np.ndarray  # column j: khat-coordinates of h_j

    def samples_at(self, grid_size: int) -> np.ndarray:
        zeta = unit_grid(grid_size)
        zs = np.array(self.spec.zeros)
        norms = _zero_kernel_norms(self.spec)
        kernels = 1.0 / (norms[:, None] * (1.0 - np.conj(zs)[:, None] * zeta[None, :]))
        return self.coefficients.T @ kernels

    def tm_coordinates(self) -> np.ndarray:
        """Column j: coordinates of h_j in the Takenaka-Malmquist basis."""
        return kernel_coordinates(self.spec) @ self.coefficients


def dual_basis(spec: BlaschkeSpec, max_condition: float = 1e13) -> DualBasis:
    """Inverts the kernel Gram; refuses numerically singular node systems."""
    gram = kernel_gram(spec)
    sigma = singular_values(gram)
    with np.errstate(over="ignore", divide="ignore"):
        condition = np.inf if sigma[-1] == 0.0 else sigma[0] / sigma[-1]
    if not condition <= max_condition:
        raise ValueError(
            f"kernel Gram condition {condition:.3e} exceeds the dual-basis "
            "limit; zeros are too close")
    return DualBasis(spec, np.linalg.inv(gram))
