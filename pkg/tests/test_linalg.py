import numpy as np
import pytest

from modelspace_lab.linalg import (
    JACOBI_MAX_SWEEPS,
    NestPartition,
    SvdConvergenceError,
    diagonal_map,
    lp_norm,
    nest_projections,
    schatten_norm,
    singular_values,
    svd,
)

RNG = np.random.default_rng(20260823)

# Frozen oracle: numpy.linalg.svd of the 8x8 Hilbert segment 1/(i+j+1).
HILBERT8_SPECTRUM = [
    1.6959389969219496,
    0.2981252113169307,
    0.026212843578119035,
    0.0014676881177418473,
    5.436943369751095e-05,
    1.2943320918745527e-06,
    1.7988737457436082e-08,
    1.1115389793345086e-10,
]


def random_complex(shape, rng=RNG):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (3, 5), (5, 3), (8, 8), (24, 24), (32, 17)])
def test_svd_reconstruction_and_unitarity(shape):
    m = random_complex(shape)
    left, values, right = svd(m)
    scale = np.linalg.norm(m)
    assert np.linalg.norm(m - (left * values) @ right.conj().T) <= 1e-10 * scale
    k = left.shape[1]
    assert np.max(np.abs(left.conj().T @ left - np.eye(k))) <= 1e-10
    assert np.max(np.abs(right.conj().T @ right - np.eye(right.shape[1]))) <= 1e-10
    assert np.all(np.diff(values) <= 0)
    assert np.all(values >= 0)


@pytest.mark.parametrize("n,rank", [(6, 2), (10, 4), (12, 1)])
def test_svd_rank_deficient(n, rank):
    m = random_complex((n, rank)) @ random_complex((rank, n))
    left, values, right = svd(m)
    assert np.linalg.norm(m - (left * values) @ right.conj().T) <= 1e-10 * np.linalg.norm(m)
    assert np.max(np.abs(left.conj().T @ left - np.eye(n))) <= 1e-10
    assert np.sum(values > 1e-10 * values[0]) == rank


def test_svd_matches_library_oracle():
    for shape in [(4, 4), (9, 6), (16, 16)]:
        m = random_complex(shape)
        mine = svd(m).values
        oracle = np.linalg.svd(m, compute_uv=False)
        np.testing.assert_allclose(mine, oracle, rtol=1e-10, atol=1e-12)


def test_hilbert_segment_spectrum_frozen_oracle():
    h = np.array([[1.0 / (i + j + 1) for j in range(8)] for i in range(8)], dtype=complex)
    np.testing.assert_allclose(svd(h).values, HILBERT8_SPECTRUM, rtol=0, atol=1e-8)


def test_svd_zero_matrix():
    left, values, right = svd(np.zeros((2, 2), dtype=complex))
    np.testing.assert_allclose(values, [0.0, 0.0])
    assert np.max(np.abs(left.conj().T @ left - np.eye(2))) <= 1e-12
    assert np.max(np.abs(right.conj().T @ right - np.eye(2))) <= 1e-12


def test_svd_examples():
    np.testing.assert_allclose(singular_values(np.diag([3.0, 4.0j])), [4.0, 3.0], atol=1e-14)
    np.testing.assert_allclose(singular_values(np.array([[0.0, 1.0], [0.0, 0.0]])),
                               [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(singular_values(np.eye(5)), np.ones(5), atol=1e-14)


def test_svd_rejects_bad_input():
    with pytest.raises(ValueError):
        svd(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        svd(np.zeros((0, 3)))


def test_svd_sweep_cap_diagnostic():
    m = random_complex((6, 6))
    with pytest.raises(SvdConvergenceError) as err:
        svd(m, max_sweeps=0)
    assert err.value.residual == np.inf or err.value.residual >= 0
    assert err.value.sweeps == 0
    # the default cap is generous for desk-scale matrices
    assert JACOBI_MAX_SWEEPS == 30


def test_schatten_examples():
    m = np.diag([3.0, 4.0])
    assert schatten_norm(m, 1) == pytest.approx(7.0, abs=1e-12)
    assert schatten_norm(m, 2) == pytest.approx(5.0, abs=1e-12)
    assert schatten_norm(m, np.inf) == pytest.approx(4.0, abs=1e-12)
    # quasi-norm branch: (1^0.5 + 1^0.5)^2 = 4
    assert schatten_norm(np.eye(2), 0.5) == pytest.approx(4.0, abs=1e-12)


def test_schatten_rejects_nonpositive_p():
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), 0.0)
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), -1.0)


def test_schatten_monotone_in_p():
    m = random_complex((7, 7))
    ps = [0.5, 1.0, 2.0, 4.0, np.inf]
    norms = [schatten_norm(m, p) for p in ps]
    for a, b in zip(norms, norms[1:]):
        assert a >= b - 1e-12


def test_schatten_two_equals_frobenius():
    for _ in range(3):
        m = random_complex((6, 9))
        assert schatten_norm(m, 2) == pytest.approx(np.linalg.norm(m), abs=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, np.inf])
def test_schatten_triangle_inequality(p):
    a = random_complex((6, 6))
    b = random_complex((6, 6))
    assert schatten_norm(a + b, p) <= schatten_norm(a, p) + schatten_norm(b, p) + 1e-10


def test_schatten_unitary_invariance():
    m = random_complex((8, 8))
    u, _ = np.linalg.qr(random_complex((8, 8)))
    w, _ = np.linalg.qr(random_complex((8, 8)))
    for p in [1.0, 2.0, np.inf]:
        assert schatten_norm(u @ m @ w, p) == pytest.approx(schatten_norm(m, p), rel=1e-10)


def test_nest_projection_example_2x2():
    m = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    t, r, d = nest_projections(m, NestPartition((0, 1, 2)))
    np.testing.assert_array_equal(t, [[0, 2], [0, 0]])
    np.testing.assert_array_equal(d, [[1, 0], [0, 4]])
    np.testing.assert_array_equal(r, [[1, 2], [0, 4]])


def test_nest_trivial_partition():
    m = random_complex((5, 5))
    t, r, d = nest_projections(m, NestPartition((0, 5)))
    assert np.all(t == 0)
    np.testing.assert_array_equal(r, m)
    np.testing.assert_array_equal(d, m)


def test_nest_identity_r_equals_t_plus_d_exact():
    m = random_complex((9, 9))
    for part in [NestPartition((0, 3, 6, 9)), NestPartition((0, 1, 9)),
                 NestPartition.full_refinement(9)]:
        t, r, d = nest_projections(m, part)
        assert np.array_equal(r, t + d)  # exact, no arithmetic involved


def test_nest_full_refinement_diagonal():
    m = random_complex((6, 6))
    t, r, d = nest_projections(m, NestPartition.full_refinement(6))
    np.testing.assert_array_equal(d, np.diag(np.diagonal(m)))
    np.testing.assert_array_equal(t, np.triu(m, 1))


def test_nest_validation():
    with pytest.raises(ValueError):
        NestPartition((1, 2))
    with pytest.raises(ValueError):
        NestPartition((0, 2, 2, 4))
    with pytest.raises(ValueError):
        nest_projections(random_complex((3, 3)), NestPartition((0, 2)))
    with pytest.raises(ValueError):
        nest_projections(random_complex((2, 3)), NestPartition((0, 2)))


def test_diagonal_map_example():
    np.testing.assert_array_equal(diagonal_map(np.array([[1, 2], [3, 4]])), [1, 4])


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, np.inf])
def test_diagonal_lp_below_schatten(p):
    m = random_complex((8, 8))
    assert lp_norm(diagonal_map(m), p) <= schatten_norm(m, p) + 1e-10


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, np.inf])
def test_diagonal_embedding_schatten_equals_lp(p):
    v = np.array([1.0, 4.0, 2.0j, -0.5])
    assert schatten_norm(np.diag(v), p) == pytest.approx(lp_norm(v, p), rel=1e-12)
