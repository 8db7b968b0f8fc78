"""Tests for Rayleigh-Ritz, the block updates and the residual helpers."""

# Third-party imports
import numpy as np
import scipy.linalg
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

# Local imports
from lobpcg_app.exceptions import BasisDegenerate
from lobpcg_app.operators import CallbackOperator
from lobpcg_app.rayleigh_ritz import (
    convergence_check,
    rayleigh_ritz,
    residual_block,
    update_blocks,
)
from spmm_app.blockvector import BlockVector
from spmm_app.exceptions import DimensionMismatch
from spmm_app.kernels import apply_symmetric
from spmm_app.tests.test_kernels import random_lower


def unit_block(n, columns):
    """Block of unit vectors e_c for the given columns."""
    block = np.zeros((n, len(columns)))
    block[columns, np.arange(len(columns))] = 1.0
    return block


class RayleighRitzTest(SimpleTestCase):
    """Test cases for rayleigh_ritz."""

    def setUp(self):
        """Diagonal operator diag(1..30)."""
        self.d = np.arange(1.0, 31.0)

    def test_diagonal_operator_picks_smallest(self):
        """Test X and W of unit vectors give the smallest diagonal entries."""
        X = unit_block(30, [10, 11, 12, 13])
        W = unit_block(30, [0, 1, 2, 3])
        (C1, C2, C3), theta = rayleigh_ritz(
            (X, W, None), (self.d[:, None] * X, self.d[:, None] * W, None), 4
        )
        np.testing.assert_allclose(theta, [1.0, 2.0, 3.0, 4.0], atol=1e-13)
        self.assertIsNone(C3)
        np.testing.assert_allclose(np.abs(C2), np.eye(4), atol=1e-13)
        np.testing.assert_allclose(C1, np.zeros((4, 4)), atol=1e-13)

    def test_zero_directions_are_degenerate(self):
        """Test a zero P fails, and dropping it gives the two-part answer."""
        rng = np.random.default_rng(1)
        X, _ = np.linalg.qr(rng.normal(size=(30, 3)))
        W, _ = np.linalg.qr(rng.normal(size=(30, 3)))
        P = np.zeros((30, 3))
        images = (self.d[:, None] * X, self.d[:, None] * W, P.copy())
        with self.assertRaises(BasisDegenerate):
            rayleigh_ritz((X, W, P), images, 3)
        _, theta = rayleigh_ritz((X, W, None), images[:2] + (None,), 3)
        G = np.hstack([X, W]).T @ (self.d[:, None] * np.hstack([X, W]))
        O = np.hstack([X, W]).T @ np.hstack([X, W])
        expected = scipy.linalg.eigh(G, O, eigvals_only=True)[:3]
        np.testing.assert_allclose(theta, expected, rtol=1e-10)

    def test_matches_dense_projection(self):
        """Test a random 150 x 24 basis against the dense projected pencil."""
        rng = np.random.default_rng(2)
        A = rng.normal(size=(150, 150))
        H = A + A.T
        S = rng.normal(size=(150, 24))
        parts = (S[:, :8], S[:, 8:16], S[:, 16:])
        images = tuple(H @ part for part in parts)
        (C1, C2, C3), theta = rayleigh_ritz(parts, images, 8)
        expected = scipy.linalg.eigh(S.T @ H @ S, S.T @ S, eigvals_only=True)[:8]
        np.testing.assert_allclose(theta, expected, rtol=1e-10, atol=1e-10)
        X_next = S @ np.vstack([C1, C2, C3])
        np.testing.assert_allclose(X_next.T @ X_next, np.eye(8), atol=1e-10)

    def test_images_must_match_parts(self):
        """Test a missing image raises DimensionMismatch."""
        X = unit_block(30, [0, 1])
        with self.assertRaises(DimensionMismatch):
            rayleigh_ritz((X, X, None), (X, None, None), 2)


class UpdateBlocksTest(SimpleTestCase):
    """Test cases for update_blocks."""

    def setUp(self):
        """Random blocks with exact images under a CSB operator."""
        self.L, self.D, self.H = random_lower(80, 0.1, 32, seed=3)
        rng = np.random.default_rng(4)
        self.S = tuple(BlockVector(rng.normal(size=(80, 5))) for _ in range(3))
        self.HS = tuple(apply_symmetric(self.L, self.D, part) for part in self.S)

    def test_identity_update(self):
        """Test C1 = I keeps X and zeroes P."""
        eye, zero = np.eye(5), np.zeros((5, 5))
        X, HX, P, HP = update_blocks(self.S, self.HS, eye, zero, zero)
        np.testing.assert_array_equal(X.data, self.S[0].data)
        np.testing.assert_array_equal(HX.data, self.HS[0].data)
        np.testing.assert_array_equal(P.data, np.zeros((80, 5)))
        np.testing.assert_array_equal(HP.data, np.zeros((80, 5)))

    def test_pure_w_update(self):
        """Test C2 = I makes X and P equal to W."""
        eye, zero = np.eye(5), np.zeros((5, 5))
        X, HX, P, HP = update_blocks(self.S, self.HS, zero, eye, zero)
        for block in (X, P):
            np.testing.assert_array_equal(block.data, self.S[1].data)
        for image in (HX, HP):
            np.testing.assert_array_equal(image.data, self.HS[1].data)

    def test_recurrence_matches_explicit_product(self):
        """Test the recurrence images equal freshly computed products."""
        rng = np.random.default_rng(5)
        C1, C2, C3 = (rng.normal(size=(5, 5)) for _ in range(3))
        op = CallbackOperator(80, lambda W: apply_symmetric(self.L, self.D, W))
        X, HX, P, HP = update_blocks(self.S, self.HS, C1, C2, C3)
        self.assertEqual(op.calls, 0)
        for block, image in ((X, HX), (P, HP)):
            explicit = op(block).data
            drift = np.linalg.norm(image.data - explicit) / np.linalg.norm(explicit)
            self.assertLess(drift, 1e-11)

    def test_without_p(self):
        """Test a two-part update ignores the missing P."""
        rng = np.random.default_rng(6)
        C1, C2 = rng.normal(size=(5, 5)), rng.normal(size=(5, 5))
        X, _, P, _ = update_blocks(
            (self.S[0], self.S[1], None), (self.HS[0], self.HS[1], None), C1, C2, None
        )
        np.testing.assert_allclose(P.data, self.S[1].data @ C2, atol=1e-13)
        np.testing.assert_allclose(X.data, self.S[0].data @ C1 + P.data, atol=1e-13)

    def test_shape_mismatch(self):
        """Test coefficient rows must match block widths."""
        with self.assertRaises(DimensionMismatch):
            update_blocks(self.S, self.HS, np.eye(4), np.eye(5), np.eye(5))


class ResidualBlockTest(SimpleTestCase):
    """Test cases for residual_block."""

    def test_exact_eigenpairs(self):
        """Test exact pairs of a diagonal operator give R = 0."""
        d = np.arange(1.0, 11.0)
        X = unit_block(10, [0, 1, 2])
        R = residual_block(d[:, None] * X, X, d[:3])
        np.testing.assert_array_equal(R.data, np.zeros((10, 3)))

    def test_zero_theta(self):
        """Test theta = 0 returns HX."""
        rng = np.random.default_rng(7)
        HX, X = rng.normal(size=(10, 3)), rng.normal(size=(10, 3))
        np.testing.assert_array_equal(residual_block(HX, X, np.zeros(3)).data, HX)

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=20, deadline=None)
    def test_matches_column_loop(self, seed):
        """Test against a column-by-column loop."""
        rng = np.random.default_rng(seed)
        HX, X, theta = rng.normal(size=(12, 4)), rng.normal(size=(12, 4)), rng.normal(size=4)
        expected = np.empty_like(HX)
        for v in range(4):
            expected[:, v] = HX[:, v] - theta[v] * X[:, v]
        np.testing.assert_array_equal(residual_block(HX, X, theta).data, expected)


class ConvergenceCheckTest(SimpleTestCase):
    """Test cases for convergence_check."""

    def test_zero_residual(self):
        """Test R = 0 converges every column."""
        X = unit_block(6, [0, 1, 2])
        flags, count = convergence_check(np.zeros((6, 3)), X, [1.0, 2.0, 3.0], 1e-6)
        self.assertTrue(flags.all())
        self.assertEqual(count, 3)

    def test_relative_boundary(self):
        """Test twice the bound fails and half the bound passes."""
        X = unit_block(6, [0, 1])
        R = np.zeros((6, 2))
        R[2, 0] = 2 * 1e-6 * 5.0
        R[3, 1] = 0.5 * 1e-6 * 5.0
        flags, count = convergence_check(R, X, [5.0, 5.0], 1e-6)
        self.assertEqual(flags.tolist(), [False, True])
        self.assertEqual(count, 1)

    def test_small_theta_uses_unit_scale(self):
        """Test |theta| < 1 is measured against 1."""
        X = unit_block(6, [0])
        R = np.zeros((6, 1))
        R[1, 0] = 0.5e-6
        flags, _ = convergence_check(R, X, [1e-3], 1e-6)
        self.assertTrue(flags[0])

    def test_counts_first_k_only(self):
        """Test converged columns past k are not counted."""
        X = unit_block(6, [0, 1, 2, 3])
        R = np.zeros((6, 4))
        R[5, 1] = 1.0
        flags, count = convergence_check(R, X, np.ones(4), 1e-6, k=2)
        self.assertEqual(flags.tolist(), [True, False, True, True])
        self.assertEqual(count, 1)

    def test_random_against_formula(self):
        """Test random inputs against the formula evaluated column by column."""
        rng = np.random.default_rng(8)
        R, X = rng.normal(size=(20, 6)) * 1e-3, rng.normal(size=(20, 6))
        theta = rng.normal(size=6) * 100
        tol = 1e-4
        flags, count = convergence_check(R, X, theta, tol, k=4)
        expected = [
            np.linalg.norm(R[:, v]) <= tol * max(1.0, abs(theta[v])) * np.linalg.norm(X[:, v])
            for v in range(6)
        ]
        self.assertEqual(flags.tolist(), expected)
        self.assertEqual(count, sum(expected[:4]))
