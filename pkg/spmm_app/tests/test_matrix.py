"""Tests for CSB_Coo construction."""

# Third-party imports
import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

# Local imports
from spmm_app.exceptions import BlockTooLarge, DuplicateEntry, IndexOutOfRange
from spmm_app.matrix import (
    MAX_BLOCK_EXTENT,
    build_csb_coo,
    csb_from_arrays,
    uniform_boundaries,
)


def random_triples(n, count, seed):
    """Return ``count`` distinct random triples on an n x n matrix."""
    rng = np.random.default_rng(seed)
    keys = rng.choice(n * n, size=count, replace=False)
    return [(int(k // n), int(k % n), float(rng.normal())) for k in keys]


class BuildCsbCooTest(SimpleTestCase):
    """Test cases for build_csb_coo."""

    def test_identity_single_block(self):
        """Test 2x2 identity in one block keeps both diagonal entries."""
        H = build_csb_coo([(0, 0, 1.0), (1, 1, 1.0)], 2, 2, [0, 2], [0, 2])
        self.assertEqual(H.block_nnz.tolist(), [[2]])
        self.assertEqual(H.values.tolist(), [1.0, 1.0])
        self.assertEqual(H.local_rows.tolist(), [0, 1])
        self.assertEqual(H.local_cols.tolist(), [0, 1])

    def test_empty_matrix(self):
        """Test an empty triple list gives zero counts and empty arrays."""
        H = build_csb_coo([], 4, 4, [0, 2, 4], [0, 2, 4])
        self.assertEqual(H.block_nnz.tolist(), [[0, 0], [0, 0]])
        self.assertEqual(H.nnz, 0)
        self.assertEqual(H.local_rows.size, 0)

    def test_round_trip_random(self):
        """Test flattening to COO reproduces the input multiset."""
        triples = random_triples(50, 100, seed=3)
        bounds = uniform_boundaries(50, 16)
        H = build_csb_coo(triples, 50, 50, bounds, bounds)
        rows, cols, vals = H.to_coo()
        got = sorted(zip(rows.tolist(), cols.tolist(), vals.tolist()))
        self.assertEqual(got, sorted(triples))

    def test_local_indices_are_two_bytes(self):
        """Test local indices use uint16 storage."""
        H = build_csb_coo(random_triples(40, 30, seed=1), 40, 40, [0, 20, 40], [0, 40])
        self.assertEqual(H.local_rows.dtype, np.uint16)
        self.assertEqual(H.local_cols.dtype, np.uint16)

    def test_offsets_are_exclusive_prefix(self):
        """Test block_nnz_offsets is the row-major exclusive prefix sum."""
        bounds = uniform_boundaries(50, 16)
        H = build_csb_coo(random_triples(50, 200, seed=7), 50, 50, bounds, bounds)
        flat_counts = H.block_nnz.reshape(-1)
        flat_offsets = H.block_nnz_offsets.reshape(-1)
        np.testing.assert_array_equal(np.diff(flat_offsets), flat_counts[:-1])
        self.assertEqual(int(flat_counts.sum()), H.nnz)

    def test_intra_block_order_preserved(self):
        """Test nonzeros inside a block keep their input order."""
        triples = [(1, 1, 3.0), (0, 0, 1.0), (1, 0, 2.0)]
        H = build_csb_coo(triples, 2, 2, [0, 2], [0, 2])
        self.assertEqual(H.values.tolist(), [3.0, 1.0, 2.0])

    def test_block_too_large(self):
        """Test a block extent above 32000 is rejected."""
        n = MAX_BLOCK_EXTENT + 1
        with self.assertRaises(BlockTooLarge):
            build_csb_coo([], n, 1, [0, n], [0, 1])

    def test_index_out_of_range(self):
        """Test coordinates outside the matrix are rejected."""
        with self.assertRaises(IndexOutOfRange):
            build_csb_coo([(2, 0, 1.0)], 2, 2, [0, 2], [0, 2])

    def test_duplicate_entry(self):
        """Test duplicate coordinates are rejected."""
        with self.assertRaises(DuplicateEntry):
            build_csb_coo([(0, 1, 1.0), (0, 1, 2.0)], 2, 2, [0, 2], [0, 2])

    def test_transpose_matches_dense(self):
        """Test explicit transpose equals the dense transpose."""
        bounds = uniform_boundaries(30, 8)
        H = build_csb_coo(random_triples(30, 60, seed=11), 30, 30, bounds, bounds)
        np.testing.assert_array_equal(H.transpose().to_dense(), H.to_dense().T)

    def test_strictly_lower_flag(self):
        """Test is_strictly_lower detects diagonal entries."""
        lower = build_csb_coo([(1, 0, 1.0)], 2, 2, [0, 2], [0, 2])
        diag = build_csb_coo([(1, 1, 1.0)], 2, 2, [0, 2], [0, 2])
        self.assertTrue(lower.is_strictly_lower)
        self.assertFalse(diag.is_strictly_lower)


class CsbInvariantPropertyTest(SimpleTestCase):
    """Property tests on randomly blocked matrices."""

    @settings(max_examples=30, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=60),
        block=st.integers(min_value=1, max_value=25),
        fill=st.floats(min_value=0.0, max_value=0.3),
        seed=st.integers(min_value=0, max_value=10_000),
    )
    def test_local_indices_in_block_extent(self, n, block, fill, seed):
        """Test every local index lies inside its block and round-trips."""
        count = int(fill * n * n)
        triples = random_triples(n, count, seed)
        bounds = uniform_boundaries(n, block)
        H = build_csb_coo(triples, n, n, bounds, bounds)
        bi, bj = H.block_index
        heights = np.diff(H.row_offsets)[bi]
        widths = np.diff(H.col_offsets)[bj]
        self.assertTrue(np.all(H.local_rows < heights))
        self.assertTrue(np.all(H.local_cols < widths))
        self.assertTrue(np.all(H.local_rows < MAX_BLOCK_EXTENT))
        rows, cols, vals = H.to_coo()
        got = sorted(zip(rows.tolist(), cols.tolist(), vals.tolist()))
        self.assertEqual(got, sorted(triples))

    def test_uneven_boundaries(self):
        """Test explicit uneven boundaries are honoured."""
        H = csb_from_arrays([0, 5, 9], [9, 0, 5], [1.0, 2.0, 3.0], 10, 10, [0, 3, 10], [0, 7, 10])
        self.assertEqual(H.block_nnz.tolist(), [[0, 1], [2, 0]])
