import math
import warnings

import numpy as np
import pytest

from ibmi.exceptions import (
    DimensionMismatch,
    IndexOutOfRange,
    NoConvergenceWarning,
    NotPositiveDefinite,
    ZeroPivot,
)
from ibmi.kernels import KernelSpec, grid_1d, kernel_matrix
from ibmi.linalg import (
    cholesky,
    chol_solve,
    condition_number_2,
    gather,
    ldlt,
    matmul,
    scatter_add_assign,
    spd_inverse,
    two_norm,
)

from conftest import gauss_jordan_inverse, naive_matmul, random_spd


class TestCholesky:
    def test_identity(self):
        f = cholesky(np.eye(3))
        np.testing.assert_array_equal(f.l, np.eye(3))

    def test_two_by_two_hand_elimination(self):
        f = cholesky([[4.0, 2.0], [2.0, 3.0]])
        expected = np.array([[2.0, 0.0], [1.0, math.sqrt(2.0)]])
        np.testing.assert_allclose(f.l, expected, rtol=1e-15)

    def test_kernel_matrix_is_factorable(self):
        a = kernel_matrix(KernelSpec("rbf", sigma=0.5), grid_1d(64))
        f = cholesky(a)
        assert np.all(np.diag(f.l) > 0)

    @pytest.mark.parametrize("p", [5, 17, 64])
    def test_reconstruction_roundtrip(self, p):
        a = random_spd(p, seed=p)
        f = cholesky(a)
        rel = np.linalg.norm(f.l @ f.l.T - a) / np.linalg.norm(a)
        assert rel <= 1e-10

    def test_strictly_lower_output(self):
        f = cholesky(random_spd(9, seed=1))
        assert np.all(np.triu(f.l, 1) == 0.0)

    def test_not_positive_definite_reports_step(self):
        a = np.eye(4)
        a[2, 2] = -1.0
        with pytest.raises(NotPositiveDefinite) as info:
            cholesky(a)
        assert info.value.index == 2

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            cholesky(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            cholesky([[1.0, 2.0], [0.5, 3.0]])


class TestLdlt:
    def test_identity(self):
        f = ldlt(np.eye(4))
        np.testing.assert_array_equal(f.l, np.eye(4))
        np.testing.assert_array_equal(f.d, np.ones(4))

    def test_two_by_two_hand_elimination(self):
        f = ldlt([[4.0, 2.0], [2.0, 3.0]])
        np.testing.assert_allclose(f.l, [[1.0, 0.0], [0.5, 1.0]], rtol=1e-15)
        np.testing.assert_allclose(f.d, [4.0, 2.0], rtol=1e-15)

    def test_diagonal(self):
        f = ldlt(np.diag([2.0, 5.0, 7.0]))
        np.testing.assert_array_equal(f.l, np.eye(3))
        np.testing.assert_array_equal(f.d, [2.0, 5.0, 7.0])

    @pytest.mark.parametrize("p", [6, 63, 300])
    def test_reconstruction_roundtrip(self, p):
        # p=300 exercises the blocked panel path (panel width 256).
        a = random_spd(p, seed=100 + p)
        f = ldlt(a)
        rel = np.linalg.norm(f.l @ np.diag(f.d) @ f.l.T - a) / np.linalg.norm(a)
        assert rel <= 1e-10
        assert np.all(np.diag(f.l) == 1.0)
        assert np.all(f.d > 0)

    def test_indefinite_but_factorable(self):
        b = np.array([[2.0, 1.0, 0.0], [1.0, -3.0, 2.0], [0.0, 2.0, 1.0]])
        f = ldlt(b)
        np.testing.assert_allclose(f.l @ np.diag(f.d) @ f.l.T, b, atol=1e-14)

    def test_zero_pivot(self):
        with pytest.raises(ZeroPivot) as info:
            ldlt(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert info.value.index == 1


class TestCholSolve:
    def test_identity_factor_returns_rhs(self, rng):
        f = cholesky(np.eye(3))
        b = rng.standard_normal((3, 2))
        np.testing.assert_array_equal(chol_solve(f, b), b)

    def test_two_by_two_hand_solve(self):
        f = cholesky([[4.0, 2.0], [2.0, 3.0]])
        x = chol_solve(f, [[1.0], [0.0]])
        np.testing.assert_allclose(x, [[0.375], [-0.25]], rtol=1e-14)

    def test_diagonal_inverse(self):
        f = cholesky(np.diag([2.0, 4.0]))
        np.testing.assert_allclose(chol_solve(f, np.eye(2)), np.diag([0.5, 0.25]))

    def test_residual_on_well_conditioned(self, rng):
        a = random_spd(40, seed=3)
        b = rng.standard_normal((40, 5))
        x = chol_solve(cholesky(a), b)
        assert np.linalg.norm(a @ x - b) / np.linalg.norm(b) <= 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            chol_solve(cholesky(np.eye(3)), np.ones((4, 1)))


class TestSpdInverse:
    def test_identity(self):
        np.testing.assert_array_equal(spd_inverse(np.eye(5)), np.eye(5))

    def test_diagonal(self):
        np.testing.assert_allclose(
            spd_inverse(np.diag([2.0, 4.0, 8.0])), np.diag([0.5, 0.25, 0.125])
        )

    def test_two_by_two_adjugate(self):
        inv = spd_inverse([[4.0, 2.0], [2.0, 3.0]])
        np.testing.assert_allclose(inv, np.array([[3.0, -2.0], [-2.0, 4.0]]) / 8.0, rtol=1e-14)

    @pytest.mark.parametrize("p", [8, 33, 64])
    def test_against_gauss_jordan_oracle(self, p):
        a = random_spd(p, seed=200 + p)
        inv = spd_inverse(a)
        oracle = gauss_jordan_inverse(a)
        np.testing.assert_allclose(inv, oracle, rtol=1e-8, atol=1e-12)

    def test_output_exactly_symmetric(self):
        inv = spd_inverse(random_spd(21, seed=5))
        np.testing.assert_array_equal(inv, inv.T)

    def test_residual_norm(self):
        a = random_spd(50, seed=6)
        assert two_norm(a @ spd_inverse(a) - np.eye(50)) <= 1e-8


class TestMatmul:
    def test_identity(self, rng):
        a = rng.standard_normal((4, 4))
        np.testing.assert_array_equal(matmul(a, np.eye(4)), a)

    def test_hand_multiply(self):
        out = matmul([[1.0, 2.0], [3.0, 4.0]], [[5.0], [6.0]])
        np.testing.assert_array_equal(out, [[17.0], [39.0]])

    def test_row_times_ones(self):
        np.testing.assert_array_equal(matmul([[1.0, 1.0, 1.0]], np.ones((3, 1))), [[3.0]])

    @pytest.mark.parametrize("shape", [(7, 5, 6), (12, 12, 12), (3, 20, 4)])
    def test_against_triple_loop(self, rng, shape):
        n, k, m = shape
        a = rng.standard_normal((n, k))
        b = rng.standard_normal((k, m))
        got = matmul(a, b)
        ref = naive_matmul(a, b)
        scale = np.abs(ref).max()
        assert np.abs(got - ref).max() <= 1e-13 * scale

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


class TestTwoNorm:
    def test_identity(self):
        assert two_norm(np.eye(7)) == pytest.approx(1.0, rel=1e-9)

    def test_diagonal(self):
        assert two_norm(np.diag([3.0, 1.0, 0.5])) == pytest.approx(3.0, rel=1e-6)

    def test_nilpotent(self):
        assert two_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0, rel=1e-9)

    def test_zero_matrix(self):
        assert two_norm(np.zeros((3, 3))) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_against_svd_oracle(self, seed):
        # Well-separated top singular value so power iteration is reliable.
        rng = np.random.default_rng(seed)
        u, _ = np.linalg.qr(rng.standard_normal((30, 30)))
        v, _ = np.linalg.qr(rng.standard_normal((30, 30)))
        svals = np.concatenate([[5.0], rng.uniform(0.1, 2.0, 29)])
        a = (u * svals) @ v.T
        oracle = np.linalg.svd(a, compute_uv=False)[0]
        assert two_norm(a) == pytest.approx(oracle, rel=1e-6)

    def test_lower_bound_consistency(self, rng):
        a = rng.standard_normal((25, 25))
        norm = two_norm(a)
        for _ in range(10):
            v = rng.standard_normal(25)
            assert norm >= np.linalg.norm(a @ v) / np.linalg.norm(v) - 1e-6

    def test_rectangular(self, rng):
        a = rng.standard_normal((12, 30))
        oracle = np.linalg.svd(a, compute_uv=False)[0]
        assert two_norm(a) == pytest.approx(oracle, rel=1e-5)

    def test_non_convergence_warns_and_returns(self, rng):
        a = rng.standard_normal((20, 20))
        with pytest.warns(NoConvergenceWarning):
            value = two_norm(a, max_iters=2)
        assert value > 0.0


class TestGatherScatter:
    def test_gather_all_is_identity(self, rng):
        a = rng.standard_normal((4, 4))
        np.testing.assert_array_equal(gather(a, np.arange(4), np.arange(4)), a)

    def test_gather_identity_submatrix(self):
        out = gather(np.eye(4), [0, 2], [0, 2])
        np.testing.assert_array_equal(out, np.eye(2))

    def test_gather_single_entry(self):
        assert gather([[1.0, 2.0], [3.0, 4.0]], [1], [0]) == np.array([[3.0]])

    def test_gather_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            gather(np.eye(3), [0, 3], [0])

    def test_scatter_full_range(self, rng):
        src = rng.standard_normal((3, 3))
        target = np.zeros((3, 3))
        scatter_add_assign(target, np.arange(3), np.arange(3), src)
        np.testing.assert_array_equal(target, src)

    def test_scatter_single_entry(self):
        target = np.zeros((2, 2))
        scatter_add_assign(target, [1], [1], [[9.0]])
        np.testing.assert_array_equal(target, [[0.0, 0.0], [0.0, 9.0]])

    def test_scatter_gather_roundtrip(self, rng):
        a = rng.standard_normal((6, 6))
        before = a.copy()
        rows, cols = np.array([1, 3, 4]), np.array([0, 2])
        scatter_add_assign(a, rows, cols, gather(a, rows, cols))
        np.testing.assert_array_equal(a, before)

    def test_scatter_add_mode(self):
        target = np.ones((2, 2))
        scatter_add_assign(target, [0], [0], [[2.0]], add=True)
        np.testing.assert_array_equal(target, [[3.0, 1.0], [1.0, 1.0]])

    def test_scatter_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            scatter_add_assign(np.zeros((3, 3)), [0, 1], [0], np.ones((1, 1)))


class TestConditionNumber:
    def test_identity(self):
        assert condition_number_2(np.eye(10)) == pytest.approx(1.0, rel=1e-9)

    def test_diagonal(self):
        assert condition_number_2(np.diag([100.0, 1.0])) == pytest.approx(100.0, rel=1e-6)

    @pytest.mark.parametrize("p", [16, 48])
    def test_against_numpy_cond(self, p):
        a = random_spd(p, seed=300 + p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NoConvergenceWarning)
            est = condition_number_2(a)
        assert est == pytest.approx(np.linalg.cond(a, 2), rel=0.01)

    def test_rejects_indefinite(self):
        a = np.eye(3)
        a[1, 1] = -2.0
        with pytest.raises(NotPositiveDefinite):
            condition_number_2(a)
