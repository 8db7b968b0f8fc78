"""Tests for the small dense kernels."""

# Third-party imports
import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

# Local imports
from densela_app.dense import (
    cholesky,
    gram,
    qr_of_transpose,
    sygv_lowest,
    trsm_right_inv,
)
from densela_app.exceptions import NotPositiveDefinite, RankDeficient, SingularTriangular
from spmm_app.blockvector import BlockVector
from spmm_app.exceptions import DimensionMismatch


def jacobi_eigenvalues(A, sweeps=50):
    """Cyclic Jacobi eigenvalues of a symmetric matrix, ascending."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off < 1e-15 * np.linalg.norm(A):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
    return np.sort(np.diag(A))


def random_spd(n, seed, cond=10.0):
    """Random SPD matrix with controlled condition number."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ np.diag(np.geomspace(1.0, cond, n)) @ Q.T


class GramTest(SimpleTestCase):
    """Test cases for gram."""

    def test_orthonormal_block_gives_identity(self):
        """Test orthonormal columns give the identity."""
        Q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(50, 6)))
        np.testing.assert_allclose(gram(Q, Q), np.eye(6), atol=1e-14)

    def test_disjoint_unit_vectors(self):
        """Test e1 and e2 columns are orthogonal."""
        e1 = np.zeros((4, 1))
        e2 = np.zeros((4, 1))
        e1[0] = e2[1] = 1.0
        np.testing.assert_array_equal(gram(e1, e2), [[0.0]])

    def test_matches_naive_loops(self):
        """Test random 200x8 blocks against a triple loop."""
        rng = np.random.default_rng(1)
        A, B = rng.normal(size=(200, 8)), rng.normal(size=(200, 8))
        naive = np.zeros((8, 8))
        for p in range(8):
            for q in range(8):
                naive[p, q] = sum(A[r, p] * B[r, q] for r in range(200))
        np.testing.assert_allclose(gram(BlockVector(A), BlockVector(B)), naive, atol=1e-13)

    def test_self_gram_exactly_symmetric(self):
        """Test gram(A, A) is exactly symmetric and column-major."""
        A = BlockVector.random(300, 7, seed=2)
        G = gram(A, A)
        np.testing.assert_array_equal(G, G.T)
        self.assertTrue(G.flags.f_contiguous)

    def test_row_mismatch(self):
        """Test different row counts raise DimensionMismatch."""
        with self.assertRaises(DimensionMismatch):
            gram(np.ones((3, 2)), np.ones((4, 2)))


class CholeskyTest(SimpleTestCase):
    """Test cases for cholesky."""

    def test_identity(self):
        """Test chol(I) = I."""
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_two_by_two(self):
        """Test [[4,2],[2,2]] factors to [[2,1],[0,1]]."""
        np.testing.assert_allclose(cholesky([[4.0, 2.0], [2.0, 2.0]]), [[2.0, 1.0], [0.0, 1.0]])

    def test_reconstructs_gram(self):
        """Test R.T R reconstructs the Gram matrix of a 100x8 block."""
        A = BlockVector.random(100, 8, seed=3)
        B = gram(A, A)
        R = cholesky(B)
        self.assertLessEqual(np.linalg.norm(R.T @ R - B), 1e-12 * np.linalg.norm(B))
        np.testing.assert_array_equal(np.tril(R, -1), 0.0)

    def test_reports_failing_pivot(self):
        """Test the first non-positive pivot index is reported."""
        B = np.diag([1.0, 2.0, -1.0, 4.0])
        with self.assertRaises(NotPositiveDefinite) as ctx:
            cholesky(B)
        self.assertEqual(ctx.exception.index, 2)


class TrsmTest(SimpleTestCase):
    """Test cases for trsm_right_inv."""

    def test_identity_leaves_block(self):
        """Test R = I leaves W unchanged."""
        W = BlockVector.random(10, 3, seed=4)
        before = W.data.copy()
        trsm_right_inv(W, np.eye(3))
        np.testing.assert_array_equal(W.data, before)

    def test_scaled_identity_halves(self):
        """Test R = 2I halves W."""
        W = BlockVector.random(10, 3, seed=5)
        before = W.data.copy()
        trsm_right_inv(W, 2.0 * np.eye(3))
        np.testing.assert_allclose(W.data, before / 2.0)

    def test_reconstruction(self):
        """Test (W R^-1) R reconstructs W."""
        W = BlockVector.random(40, 5, seed=6)
        R = np.triu(np.random.default_rng(7).normal(size=(5, 5))) + 5.0 * np.eye(5)
        before = W.data.copy()
        trsm_right_inv(W, R)
        np.testing.assert_allclose(W.data @ R, before, atol=1e-12)

    def test_singular(self):
        """Test a zero diagonal raises SingularTriangular."""
        with self.assertRaises(SingularTriangular):
            trsm_right_inv(BlockVector.zeros(4, 2), np.array([[1.0, 1.0], [0.0, 0.0]]))


class SygvLowestTest(SimpleTestCase):
    """Test cases for sygv_lowest."""

    def test_diagonal_standard_problem(self):
        """Test diag(3,1,2) with B = I gives (1, 2) and unit vectors."""
        C, D = sygv_lowest(np.diag([3.0, 1.0, 2.0]), np.eye(3), 2)
        np.testing.assert_allclose(D, [1.0, 2.0])
        np.testing.assert_allclose(C, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], atol=1e-15)

    def test_diagonal_pencil(self):
        """Test (I, diag(1,4)) gives 1/4 with eigenvector (0, 1/2)."""
        C, D = sygv_lowest(np.eye(2), np.diag([1.0, 4.0]), 1)
        np.testing.assert_allclose(D, [0.25])
        np.testing.assert_allclose(C[:, 0], [0.0, 0.5], atol=1e-15)

    def test_random_pencil_against_jacobi(self):
        """Test a random 24x24 SPD pencil against a Jacobi oracle."""
        rng = np.random.default_rng(8)
        A = rng.normal(size=(24, 24))
        A = A + A.T
        B = random_spd(24, seed=9)
        C, D = sygv_lowest(A, B, 24)
        L = np.linalg.cholesky(B)
        Linv = np.linalg.inv(L)
        oracle = jacobi_eigenvalues(Linv @ A @ Linv.T)
        np.testing.assert_allclose(D, oracle, atol=1e-9)

    def test_not_positive_definite(self):
        """Test an indefinite B surfaces NotPositiveDefinite."""
        with self.assertRaises(NotPositiveDefinite):
            sygv_lowest(np.eye(2), np.diag([1.0, -1.0]), 1)

    def test_largest_entry_positive(self):
        """Test eigenvector columns have a positive largest entry."""
        A = -np.diag([1.0, 2.0, 3.0])
        C, _ = sygv_lowest(A, np.eye(3), 3)
        for col in C.T:
            self.assertGreater(col[np.argmax(np.abs(col))], 0.0)

    @settings(max_examples=20, deadline=None)
    @given(n=st.integers(min_value=1, max_value=48), seed=st.integers(0, 10_000))
    def test_residual_and_orthonormality(self, n, seed):
        """Test A C = B C D and C.T B C = I on random pencils."""
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n))
        A = A + A.T
        B = random_spd(n, seed + 1, cond=100.0)
        k = max(1, n // 2)
        C, D = sygv_lowest(A, B, k)
        self.assertTrue(np.all(np.diff(D) >= 0))
        residual = A @ C - B @ C @ np.diag(D)
        self.assertLessEqual(np.linalg.norm(residual), 1e-10 * max(1.0, np.linalg.norm(A)))
        np.testing.assert_allclose(C.T @ B @ C, np.eye(k), atol=1e-10)


class QrOfTransposeTest(SimpleTestCase):
    """Test cases for qr_of_transpose."""

    def test_orthonormal_input(self):
        """Test an orthonormal block is returned with R close to I."""
        X, _ = np.linalg.qr(np.random.default_rng(10).normal(size=(60, 5)))
        Q, R = qr_of_transpose(X)
        np.testing.assert_allclose(np.abs(np.diag(R)), np.ones(5), atol=1e-12)
        np.testing.assert_allclose(np.abs(Q.data), np.abs(X), atol=1e-12)

    def test_identical_columns_rank_deficient(self):
        """Test two identical columns raise RankDeficient."""
        X = np.random.default_rng(11).normal(size=(30, 3))
        X[:, 2] = X[:, 0]
        with self.assertRaises(RankDeficient):
            qr_of_transpose(X)

    def test_repeated_middle_column_rank_deficient(self):
        """Test a repeated column raises RankDeficient for short and tall blocks."""
        for m in (50, 2000, 200000):
            with self.subTest(m=m):
                X = np.random.default_rng(1).normal(size=(m, 4))
                X[:, 2] = X[:, 1]
                with self.assertRaises(RankDeficient):
                    qr_of_transpose(X)

    def test_custom_gram_function(self):
        """Test the Gram hook is used for every pass and the final check."""
        calls = []

        def counting_gram(A, B):
            calls.append(1)
            return gram(A, B)

        X = BlockVector.random(80, 4, seed=14)
        Q, R = qr_of_transpose(X, gram_fn=counting_gram)
        self.assertEqual(len(calls), 3)
        np.testing.assert_allclose(Q.data.T @ Q.data, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(Q.data @ R, X.data, atol=1e-12)

    def test_zero_column_rank_deficient(self):
        """Test a zero column raises RankDeficient."""
        with self.assertRaises(RankDeficient):
            qr_of_transpose(np.zeros((10, 2)))

    def test_random_reconstruction(self):
        """Test Q R reconstructs a random 300x8 block with orthonormal Q."""
        X = BlockVector.random(300, 8, seed=12)
        Q, R = qr_of_transpose(X)
        np.testing.assert_allclose(Q.data @ R, X.data, atol=1e-12)
        np.testing.assert_allclose(Q.data.T @ Q.data, np.eye(8), atol=1e-12)
        np.testing.assert_array_equal(np.tril(R, -1), 0.0)

    def test_ill_conditioned_block(self):
        """Test condition number 1e6 still yields orthonormal columns."""
        rng = np.random.default_rng(13)
        U, _ = np.linalg.qr(rng.normal(size=(200, 6)))
        V, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        X = U @ np.diag(np.geomspace(1.0, 1e-6, 6)) @ V.T
        Q, R = qr_of_transpose(X)
        np.testing.assert_allclose(gram(Q, Q), np.eye(6), atol=1e-10)
        np.testing.assert_allclose(Q.data @ R, X, atol=1e-12)

    def test_wide_block_rejected(self):
        """Test more columns than rows raises DimensionMismatch."""
        with self.assertRaises(DimensionMismatch):
            qr_of_transpose(np.ones((2, 3)))
