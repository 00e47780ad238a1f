"""Model-space basis, kernels, projections, conjugation, dual basis."""

import numpy as np
import pytest

from modelspace_lab.blaschke import BlaschkeSpec, blaschke_eval, radial_exponential, thin
from modelspace_lab.boundary import (
    BoundaryFunction,
    QuadratureControl,
    eval_in_disk,
    inner_product,
    unit_grid,
)
from modelspace_lab.model_space import (
    DualBasis,
    GramCertificationError,
    build_basis,
    certify_gram,
    conjugation_C,
    dual_basis,
    kernel_at,
    kernel_coordinates,
    kernel_gram,
    kernel_norm_at,
    project_Ku,
    pu_conj_project,
    pu_project,
    synthesize,
    tm_basis_samples,
)
from modelspace_lab.rng import SplitMix64


def random_member(basis, stream, grid_size=None):
    coeffs = stream.complex_normal_array(basis.dim)
    return synthesize(basis, coeffs, grid_size), coeffs


class TestBasisShapes:
    def test_repeated_zero_at_origin_gives_monomials(self):
        samples = tm_basis_samples(BlaschkeSpec((0.0, 0.0)), 64)
        zeta = unit_grid(64)
        np.testing.assert_allclose(samples[0], np.ones(64), atol=1e-14)
        np.testing.assert_allclose(samples[1], zeta, atol=1e-14)

    def test_mixed_pair_second_function(self):
        # zeros (0, 1/2): e_2 = sqrt(3/4) z / (1 - z/2)
        samples = tm_basis_samples(BlaschkeSpec((0.0, 0.5)), 128)
        zeta = unit_grid(128)
        expected = np.sqrt(0.75) * zeta / (1.0 - 0.5 * zeta)
        np.testing.assert_allclose(samples[1], expected, rtol=1e-13)
        np.testing.assert_allclose(samples[0], np.ones(128), atol=1e-14)

    def test_first_function_is_normalized_kernel(self):
        spec = BlaschkeSpec((0.3 + 0.4j,))
        samples = tm_basis_samples(spec, 64)
        zeta = unit_grid(64)
        a = spec.zeros[0]
        expected = np.sqrt(1 - abs(a) ** 2) / (1 - np.conj(a) * zeta)
        np.testing.assert_allclose(samples[0], expected, rtol=1e-13)


class TestCertification:
    def test_moderate_family_certifies(self):
        basis = build_basis(radial_exponential(0.5, 8))
        assert basis.certified
        assert basis.gram_residual <= 1e-10
        assert basis.grid_size & (basis.grid_size - 1) == 0

    def test_orthonormality_at_certified_grid(self):
        basis = build_basis(radial_exponential(0.5, 6))
        funcs = basis.functions_at()
        gram = funcs.conj() @ funcs.T / basis.grid_size
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-10)

    def test_edge_family_fails_within_default_cap(self):
        spec = radial_exponential(0.5, 16)
        with pytest.raises(GramCertificationError) as info:
            build_basis(spec)
        assert info.value.grid_m == QuadratureControl().max_m
        assert info.value.residual > 1e-10

    def test_uncertified_basis_returned_on_request(self):
        basis = build_basis(radial_exponential(0.5, 16), require_certified=False)
        assert not basis.certified
        assert basis.gram_residual > 1e-10

    def test_certify_gram_streams_to_convergence(self):
        residual, grid_m = certify_gram(radial_exponential(0.5, 8))
        assert residual <= 1e-10
        assert grid_m <= 2 ** 15

    def test_certify_gram_exhaustion_raises(self):
        spec = radial_exponential(0.5, 12)
        with pytest.raises(GramCertificationError):
            certify_gram(spec, max_m=2 ** 13)

    def test_samples_cached_per_grid(self):
        basis = build_basis(radial_exponential(0.5, 4))
        assert basis.functions_at(512) is basis.functions_at(512)


class TestKernels:
    def test_kernel_example_degree_one(self):
        # u = b_{1/2}: k_0 = 1 - u(0) u = 1 - u/2, norm^2 = 3/4
        spec = BlaschkeSpec((0.5,))
        kern = kernel_at(spec, 0.0, 128)
        u = blaschke_eval(spec, unit_grid(128))
        np.testing.assert_allclose(kern.boundary.samples, 1.0 - 0.5 * u, rtol=1e-13)
        assert kern.norm == pytest.approx(np.sqrt(0.75))
        assert kern.inner_value == pytest.approx(0.5)

    def test_squared_kernel_is_pointwise_square(self):
        spec = BlaschkeSpec((0.5,))
        kern = kernel_at(spec, 0.0, 128)
        kern2 = kernel_at(spec, 0.0, 128, squared=True)
        np.testing.assert_allclose(kern2.boundary.samples,
                                   kern.boundary.samples ** 2, rtol=1e-13)
        assert kern2.inner_value == pytest.approx(kern.inner_value)
        assert kern2.norm == pytest.approx(kern2.boundary.norm())

    def test_reproducing_property(self):
        spec = radial_exponential(0.5, 5)
        basis = build_basis(spec)
        stream = SplitMix64(11).derive("reproducing")
        f, _ = random_member(basis, stream)
        for w in (0.2, -0.3 + 0.4j, 0.55j):
            kern = kernel_at(spec, w, basis.grid_size)
            lhs = inner_product(f, kern.boundary)
            rhs = eval_in_disk(f, w)
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_kernel_lies_in_model_space(self):
        spec = radial_exponential(0.5, 5)
        basis = build_basis(spec)
        kern = kernel_at(spec, 0.3 - 0.2j, basis.grid_size)
        res = kern.boundary - pu_project(kern.boundary, basis)
        assert res.norm() <= 1e-10 * kern.boundary.norm()

    def test_kernel_norm_consistency(self):
        spec = radial_exponential(0.5, 5)
        kern = kernel_at(spec, 0.4j, 4096)
        assert kern.boundary.norm() == pytest.approx(kern.norm, rel=1e-10)
        assert kernel_norm_at(spec, 0.4j) == pytest.approx(kern.norm, rel=1e-12)

    def test_boundary_anchor_rejected(self):
        with pytest.raises(ValueError, match="inside the disk"):
            kernel_at(BlaschkeSpec((0.5,)), 1.0, 64)


class TestProjection:
    def test_roundtrip_coefficients(self):
        basis = build_basis(radial_exponential(0.5, 6))
        stream = SplitMix64(5).derive("project")
        f, coeffs = random_member(basis, stream)
        np.testing.assert_allclose(project_Ku(f, basis), coeffs, atol=1e-11)

    def test_u_times_analytic_projects_to_zero(self):
        spec = radial_exponential(0.5, 6)
        basis = build_basis(spec)
        zeta = unit_grid(basis.grid_size)
        u = blaschke_eval(spec, zeta)
        g = BoundaryFunction(u * (1.0 + 0.3 * zeta + (0.2 - 0.1j) * zeta ** 2))
        assert np.max(np.abs(project_Ku(g, basis))) <= 1e-11

    def test_projection_idempotent(self):
        basis = build_basis(radial_exponential(0.5, 4))
        zeta = unit_grid(basis.grid_size)
        f = BoundaryFunction(1.0 / (1.0 - 0.9 * zeta) + 0.5 * np.conj(zeta))
        once = pu_project(f, basis)
        twice = pu_project(once, basis)
        assert (once - twice).norm() <= 1e-12 * max(once.norm(), 1.0)

    def test_conjugate_space_projection(self):
        basis = build_basis(radial_exponential(0.5, 4))
        stream = SplitMix64(9).derive("conjproj")
        f, _ = random_member(basis, stream)
        g = f.conj()
        assert (pu_conj_project(g, basis) - g).norm() <= 1e-10 * g.norm()


class TestConjugation:
    def test_constant_for_u_equals_z(self):
        # u = z: C c = conj(c)
        f = BoundaryFunction.constant(2.0 - 3.0j, 64)
        out = conjugation_C(f, BlaschkeSpec((0.0,)))
        np.testing.assert_allclose(out.samples, np.full(64, 2.0 + 3.0j), atol=1e-14)

    def test_involution(self):
        spec = radial_exponential(0.5, 5)
        basis = build_basis(spec)
        f, _ = random_member(basis, SplitMix64(13).derive("invol"))
        back = conjugation_C(conjugation_C(f, spec), spec)
        assert (back - f).norm() <= 1e-12 * f.norm()

    def test_preserves_model_space(self):
        spec = radial_exponential(0.5, 5)
        basis = build_basis(spec)
        f, _ = random_member(basis, SplitMix64(17).derive("preserve"))
        cf = conjugation_C(f, spec)
        assert (cf - pu_project(cf, basis)).norm() <= 1e-10 * cf.norm()

    def test_antiunitary_pairing(self):
        spec = radial_exponential(0.5, 5)
        basis = build_basis(spec)
        stream = SplitMix64(19).derive("pairing")
        f, _ = random_member(basis, stream)
        g, _ = random_member(basis, stream)
        lhs = inner_product(conjugation_C(f, spec), conjugation_C(g, spec))
        rhs = inner_product(g, f)
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)


class TestNodeSpaceData:
    def test_kernel_gram_matches_quadrature(self):
        spec = radial_exponential(0.5, 6)
        gram = kernel_gram(spec)
        m = 2 ** 14
        kerns = [kernel_at(spec, z, m) for z in spec.zeros]
        for i in range(6):
            for j in range(6):
                quad = inner_product(kerns[j].boundary, kerns[i].boundary)
                quad /= kerns[i].norm * kerns[j].norm
                np.testing.assert_allclose(gram[i, j], quad, atol=1e-10)

    def test_kernel_gram_hermitian_unit_diagonal(self):
        gram = kernel_gram(BlaschkeSpec((0.5, 0.3j, -0.2 - 0.6j)))
        np.testing.assert_allclose(gram, gram.conj().T, atol=1e-15)
        np.testing.assert_allclose(np.diag(gram).real, 1.0, rtol=1e-14)

    def test_coordinates_factor_the_gram(self):
        spec = radial_exponential(0.5, 6)
        coords = kernel_coordinates(spec)
        np.testing.assert_allclose(coords.conj().T @ coords, kernel_gram(spec),
                                   atol=1e-12)

    def test_coordinates_factor_the_gram_at_float_edge(self):
        # both routes use the gap-stable product, so they agree even when
        # 1 - |z|^2 underflows the naive evaluation
        spec = thin(0.5, 8)
        coords = kernel_coordinates(spec)
        gram = kernel_gram(spec)
        err = np.max(np.abs(coords.conj().T @ coords - gram))
        assert err <= 1e-8 * np.max(np.abs(gram))

    def test_coordinates_upper_triangular(self):
        coords = kernel_coordinates(radial_exponential(0.5, 5))
        np.testing.assert_allclose(np.tril(coords, -1), 0.0, atol=1e-300)

    def test_coordinates_match_quadrature_pairings(self):
        spec = radial_exponential(0.5, 4)
        basis = build_basis(spec)
        coords = kernel_coordinates(spec)
        for j, z in enumerate(spec.zeros):
            kern = kernel_at(spec, z, basis.grid_size)
            pairing = project_Ku(kern.boundary, basis) / kern.norm
            np.testing.assert_allclose(coords[:, j], pairing, atol=1e-10)

    def test_repeated_zeros_rejected(self):
        spec = BlaschkeSpec((0.5, 0.5))
        with pytest.raises(ValueError, match="simple"):
            kernel_gram(spec)
        with pytest.raises(ValueError, match="simple"):
            kernel_coordinates(spec)


class TestDualBasis:
    def test_biorthogonality_by_quadrature(self):
        spec = radial_exponential(0.5, 6)
        dual = dual_basis(spec)
        m = 2 ** 14
        h = dual.samples_at(m)
        for j in range(6):
            hj = BoundaryFunction(h[j])
            for i, z in enumerate(spec.zeros):
                kern = kernel_at(spec, z, m)
                got = inner_product(hj, kern.boundary) / kern.norm
                np.testing.assert_allclose(got, 1.0 if i == j else 0.0, atol=1e-9)

    def test_tm_coordinates_solve_gram(self):
        spec = radial_exponential(0.5, 5)
        dual = dual_basis(spec)
        coords = kernel_coordinates(spec)
        # <h_j, khat_m> = (K kappa_hj)^H ... = identity in coordinates
        np.testing.assert_allclose(coords.conj().T @ dual.tm_coordinates(),
                                   np.eye(5), atol=1e-11)

    def test_near_singular_rejected(self):
        spec = BlaschkeSpec((0.5, 0.5 + 1e-15))
        with pytest.raises(ValueError, match="condition"):
            dual_basis(spec)
