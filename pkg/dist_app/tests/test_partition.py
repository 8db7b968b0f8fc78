"""Tests for matrix and vector partitioning."""

# Third-party imports
import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

# Local imports
from dist_app.layout import build_layout
from dist_app.partition import (
    assemble_lower,
    gather_solution,
    nnz_balance,
    partition_matrix,
    partition_vectors,
)
from spmm_app.exceptions import DimensionMismatch, IndexOutOfRange, NotStrictlyLower
from spmm_app.tests.test_kernels import random_lower


class PartitionMatrixTest(SimpleTestCase):
    """Test cases for partition_matrix and assemble_lower."""

    def test_single_rank_identity_partition(self):
        """Test n_d=1 keeps the whole matrix on rank 0."""
        L, D, _ = random_lower(40, 0.1, 16, seed=1)
        layout = build_layout(1, n=40)
        parts = partition_matrix(*L.to_coo(), D, layout, block_size=16)
        self.assertEqual(len(parts), 1)
        np.testing.assert_array_equal(parts[0].matrix.to_dense(), L.to_dense())
        np.testing.assert_array_equal(parts[0].diagonal, D)

    def test_upper_wedge_entry_is_transposed(self):
        """Test the mirror of an upper-wedge entry lands transposed on its rank."""
        layout = build_layout(5, n=10)
        D = np.arange(1.0, 11.0)
        parts = partition_matrix([8], [1], [2.5], D, layout)
        owner = [p.rank for p in parts if p.nnz]
        self.assertEqual(owner, [13])
        part = parts[13]
        self.assertTrue(part.block.transposed)
        self.assertEqual(part.matrix.shape, (2, 2))
        self.assertEqual(part.matrix.to_dense()[1, 0], 2.5)
        self.assertIsNone(part.diagonal)

    def test_diagonal_slices(self):
        """Test diagonal ranks carry their slice of D."""
        layout = build_layout(3, n=9)
        D = np.arange(9.0)
        parts = partition_matrix([], [], [], D, layout)
        for c, rank in enumerate(layout.diagonal_ranks):
            np.testing.assert_array_equal(parts[rank].diagonal, D[3 * c:3 * c + 3])
        self.assertEqual(sum(p.diagonal is not None for p in parts), 3)

    def test_reassembly_reproduces_input(self):
        """Test assemble_lower undoes the partition of a random matrix."""
        L, D, _ = random_lower(200, 0.05, 32, seed=2)
        rows, cols, vals = L.to_coo()
        layout = build_layout(5, n=200)
        parts = partition_matrix(rows, cols, vals, D, layout, block_size=16)
        r, c, v, d = assemble_lower(parts, layout)
        order = np.lexsort((cols, rows))
        np.testing.assert_array_equal(r, rows[order])
        np.testing.assert_array_equal(c, cols[order])
        np.testing.assert_array_equal(v, vals[order])
        np.testing.assert_array_equal(d, D)
        self.assertEqual(sum(p.nnz for p in parts), vals.size)

    def test_rejects_upper_entries(self):
        """Test entries on or above the diagonal raise NotStrictlyLower."""
        layout = build_layout(3, n=9)
        with self.assertRaises(NotStrictlyLower):
            partition_matrix([1], [4], [1.0], np.ones(9), layout)
        with self.assertRaises(NotStrictlyLower):
            partition_matrix([2], [2], [1.0], np.ones(9), layout)

    def test_rejects_bad_input(self):
        """Test a wrong diagonal or out-of-range entry is reported."""
        layout = build_layout(3, n=9)
        with self.assertRaises(DimensionMismatch):
            partition_matrix([], [], [], np.ones(8), layout)
        with self.assertRaises(IndexOutOfRange):
            partition_matrix([9], [0], [1.0], np.ones(9), layout)


class PartitionVectorsTest(SimpleTestCase):
    """Test cases for partition_vectors and gather_solution."""

    def test_single_rank_whole_vector(self):
        """Test n_d=1 hands the whole block to rank 0."""
        V = np.random.default_rng(3).normal(size=(12, 2))
        segments = partition_vectors(V, build_layout(1, n=12))
        np.testing.assert_array_equal(segments[0], V)

    def test_round_trip(self):
        """Test n=30, n_d=5, two vectors: 15 segments and an exact round trip."""
        layout = build_layout(5, n=30)
        V = np.random.default_rng(4).normal(size=(30, 2))
        segments = partition_vectors(V, layout)
        self.assertEqual(len(segments), 15)
        self.assertTrue(all(s.shape == (2, 2) for s in segments.values()))
        np.testing.assert_array_equal(gather_solution(segments, layout).data, V)

    @given(st.lists(st.integers(1, 12), min_size=5, max_size=5), st.integers(1, 4))
    @settings(max_examples=25, deadline=None)
    def test_uneven_round_trip(self, sizes, nvec):
        """Test the round trip is exact for uneven boundaries."""
        boundaries = np.concatenate([[0], np.cumsum(sizes)])
        layout = build_layout(5, boundaries=boundaries)
        V = np.arange(layout.n * nvec, dtype=float).reshape(layout.n, nvec)
        np.testing.assert_array_equal(
            gather_solution(partition_vectors(V, layout), layout).data, V
        )

    def test_dimension_errors(self):
        """Test mismatched blocks and segments raise DimensionMismatch."""
        layout = build_layout(3, n=9)
        with self.assertRaises(DimensionMismatch):
            partition_vectors(np.ones((8, 1)), layout)
        segments = partition_vectors(np.ones((9, 1)), layout)
        del segments[2]
        with self.assertRaises(DimensionMismatch):
            gather_solution(segments, layout)
        segments = partition_vectors(np.ones((9, 1)), layout)
        segments[1] = np.ones((5, 1))
        with self.assertRaises(DimensionMismatch):
            gather_solution(segments, layout)


class NnzBalanceTest(SimpleTestCase):
    """Test cases for nnz_balance."""

    def test_uniform_blocks_are_balanced(self):
        """Test one nonzero per lower grid block gives imbalance 1."""
        layout = build_layout(5, n=10)
        rows, cols = [], []
        for i in range(5):
            for j in range(i + 1):
                rows.append(2 * i + 1)
                cols.append(2 * j)
        parts = partition_matrix(rows, cols, np.ones(len(rows)), np.ones(10), layout)
        balance = nnz_balance(parts)
        self.assertEqual(balance['per_rank'], [1] * 15)
        self.assertEqual(balance['imbalance'], 1.0)

    def test_empty_matrix(self):
        """Test an empty matrix reports imbalance 1."""
        layout = build_layout(3, n=9)
        parts = partition_matrix([], [], [], np.ones(9), layout)
        self.assertEqual(nnz_balance(parts)['imbalance'], 1.0)
