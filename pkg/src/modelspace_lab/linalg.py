"""Dense complex linear algebra for small operator matrices.

Everything works on plain complex ndarrays at desk scale (dimensions in the
tens).  The SVD is a self-contained one-sided Jacobi iteration whose failure
mode is explicit and carries a diagnostic residual; library SVDs appear only
as independent oracles in the test suite.

Orientation convention used across the package: entry (r, c) of an operator
matrix is <A e_c, e_r>, so column c holds the coordinates of the image of the
c-th basis vector.  Under this convention truncated Toeplitz matrices with
analytic symbols come out lower triangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# One-sided Jacobi controls.  A rotation is skipped once the off-diagonal
# Gram entry is below JACOBI_REL_TOL relative to the column norms; a full
# sweep with no rotations means convergence.
JACOBI_MAX_SWEEPS = 30
JACOBI_REL_TOL = 1e-14


class SvdConvergenceError(RuntimeError):
    """Jacobi sweeps hit the iteration cap without converging.

    Carries the worst relative off-diagonal Gram residual seen in the final
    sweep so the caller can judge how far from convergence the matrix was.
    """

    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"one-sided Jacobi SVD did not converge in {sweeps} sweeps; "
            f"max relative off-diagonal residual {residual:.3e}")


class SvdResult(NamedTuple):
    left: np.ndarray       # (m, n) orthonormal columns
    values: np.ndarray     # (n,) nonincreasing, nonnegative
    right: np.ndarray      # (n, n) unitary

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.values) @ self.right.conj().T


def _check_finite(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def svd(m, max_sweeps: int = JACOBI_MAX_SWEEPS,
        rel_tol: float = JACOBI_REL_TOL) -> SvdResult:
    """One-sided Jacobi SVD, m = left @ diag(values) @ right*.

    Columns of the work matrix are rotated pairwise until mutually
    orthogonal; singular values are the resulting column norms.  Raises
    SvdConvergenceError with the off-diagonal residual if the sweep cap is
    reached first.
    """
    m = _check_finite(m)
    if m.shape[0] < m.shape[1]:
        flipped = svd(m.conj().T, max_sweeps=max_sweeps, rel_tol=rel_tol)
        return SvdResult(flipped.right, flipped.values, flipped.left)

    a = m.copy()
    n = a.shape[1]
    v = np.eye(n, dtype=complex)

    residual = np.inf
    for _ in range(max_sweeps):
        rotated = False
        residual = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = a[:, p]
                aq = a[:, q]
                alpha = np.vdot(ap, ap).real
                beta = np.vdot(aq, aq).real
                if alpha == 0.0 or beta == 0.0:
                    continue
                gamma = np.vdot(ap, aq)
                scale = np.sqrt(alpha * beta)
                residual = max(residual, abs(gamma) / scale)
                if abs(gamma) <= rel_tol * scale:
                    continue
                rotated = True
                phase = gamma / abs(gamma)
                tau = (beta - alpha) / (2.0 * abs(gamma))
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                aq_ph = np.conj(phase) * aq
                a[:, p], a[:, q] = c * ap - s * aq_ph, s * ap + c * aq_ph
                vp = v[:, p].copy()
                vq_ph = np.conj(phase) * v[:, q]
                v[:, p] = c * vp - s * vq_ph
                v[:, q] = s * vp + c * vq_ph
        if not rotated:
            break
    else:
        raise SvdConvergenceError(residual, max_sweeps)

    values = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    order = np.argsort(values)[::-1]
    values = values[order]
    a = a[:, order]
    v = v[:, order]

    left = np.zeros_like(a)
    cutoff = values[0] * n * np.finfo(float).eps if values[0] > 0 else 0.0
    deficient = []
    for j in range(n):
        if values[j] > cutoff:
            left[:, j] = a[:, j] / values[j]
        else:
            values[j] = 0.0
            deficient.append(j)
    if deficient:
        _fill_orthonormal(left, deficient)
    return SvdResult(left, values, v)


def _fill_orthonormal(u: np.ndarray, empty_cols: list[int]) -> None:
    """Complete the nonzero columns of u to an orthonormal set in place."""
    m = u.shape[0]
    filled = [j for j in range(u.shape[1]) if j not in empty_cols]
    for j in empty_cols:
        for k in range(m):
            cand = np.zeros(m, dtype=complex)
            cand[k] = 1.0
            for _ in range(2):  # re-orthogonalize once for stability
                for i in filled:
                    cand -= np.vdot(u[:, i], cand) * u[:, i]
            norm = np.linalg.norm(cand)
            if norm > 0.5:
                u[:, j] = cand / norm
                filled.append(j)
                break
        else:
            raise RuntimeError("orthonormal completion failed")


def singular_values(m) -> np.ndarray:
    return svd(m).values


def schatten_norm(m, p) -> float:
    """Schatten p-norm from Jacobi singular values; p = inf gives the top one.

    For 0 < p < 1 this is the standard quasi-norm (no triangle inequality).
    """
    p = float(p)
    if not p > 0.0:
        raise ValueError(f"Schatten exponent must be positive, got {p}")
    values = singular_values(m)
    if np.isinf(p):
        return float(values[0])
    return float(np.sum(values ** p) ** (1.0 / p))


def lp_norm(v, p) -> float:
    """Sequence l^p norm of a vector, p in (0, inf]."""
    p = float(p)
    if not p > 0.0:
        raise ValueError(f"l^p exponent must be positive, got {p}")
    mags = np.abs(np.asarray(v, dtype=complex))
    if mags.size == 0:
        return 0.0
    if np.isinf(p):
        return float(np.max(mags))
    return float(np.sum(mags ** p) ** (1.0 / p))


@dataclass(frozen=True)
class NestPartition:
    """Increasing subspace dimensions 0 = s_0 < s_1 < ... < s_k = dim."""

    boundaries: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if len(b) < 2 or b[0] != 0:
            raise ValueError(f"nest must start at 0 with at least one block, got {b}")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError(f"nest boundaries must be strictly increasing, got {b}")

    @property
    def dim(self) -> int:
        return self.boundaries[-1]

    @classmethod
    def full_refinement(cls, dim: int) -> "NestPartition":
        return cls(tuple(range(dim + 1)))


class NestProjections(NamedTuple):
    triangular: np.ndarray     # T_N: strictly block upper part
    causal: np.ndarray         # R_N: block upper part including the diagonal
    block_diagonal: np.ndarray  # D_N


def nest_projections(m, partition: NestPartition) -> NestProjections:
    """Triangular truncation, causal truncation, and block diagonal.

    R_N = T_N + D_N holds exactly: the three matrices copy disjoint index
    ranges of m with no arithmetic.
    """
    m = _check_finite(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"nest projections need a square matrix, got {m.shape}")
    if partition.dim != m.shape[0]:
        raise ValueError(
            f"nest dimension {partition.dim} does not match matrix {m.shape[0]}")
    t = np.zeros_like(m)
    r = np.zeros_like(m)
    d = np.zeros_like(m)
    b = partition.boundaries
    for i in range(1, len(b)):
        lo, hi = b[i - 1], b[i]
        t[:lo, lo:hi] = m[:lo, lo:hi]
        r[:hi, lo:hi] = m[:hi, lo:hi]
        d[lo:hi, lo:hi] = m[lo:hi, lo:hi]
    return NestProjections(t, r, d)


def diagonal_map(m) -> np.ndarray:
    """Main diagonal as a vector; np.diag embeds it back when needed."""
    m = _check_finite(m)
    return np.diagonal(m).copy()
