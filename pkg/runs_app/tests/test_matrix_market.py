"""Tests for Matrix Market input and output."""

# Standard library
import tempfile
from pathlib import Path

# Third-party imports
import numpy as np
from django.test import SimpleTestCase

# Local imports
from runs_app.exceptions import NotSymmetricHeader, ParseError
from runs_app.matrix_market import ingest_matrix_market, write_matrix_market
from runs_app.synthetic import generate_synthetic

IDENTITY = """%%MatrixMarket matrix coordinate real symmetric
3 3 3
1 1 1.0
2 2 1.0
3 3 1.0
"""

UPPER_ENTRY = """%%MatrixMarket matrix coordinate real symmetric
3 3 4
1 1 4.0
2 2 5.0
3 3 6.0
1 3 2.5
"""

GENERAL = """%%MatrixMarket matrix coordinate real general
2 2 1
1 2 1.0
"""

DENSE = """%%MatrixMarket matrix array real symmetric
2 2
1.0
2.0
3.0
"""


class IngestMatrixMarketTest(SimpleTestCase):
    """Test cases for ingest_matrix_market."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text)
        return path

    def test_identity(self):
        """Test the 3 x 3 identity gives three diagonal entries and no lower ones."""
        problem = ingest_matrix_market(self.write('eye.mtx', IDENTITY))
        self.assertEqual(problem.n, 3)
        self.assertEqual(problem.vals.size, 0)
        np.testing.assert_array_equal(problem.D, np.ones(3))

    def test_upper_entry_is_mirrored(self):
        """Test an entry given at (1, 3) is stored at (3, 1)."""
        problem = ingest_matrix_market(self.write('upper.mtx', UPPER_ENTRY))
        np.testing.assert_array_equal(problem.rows, [2])
        np.testing.assert_array_equal(problem.cols, [0])
        np.testing.assert_array_equal(problem.vals, [2.5])
        np.testing.assert_array_equal(problem.D, [4.0, 5.0, 6.0])

    def test_round_trip(self):
        """Test writing and reading a generated matrix reproduces its entries."""
        original = generate_synthetic('random', 60, density=0.1, seed=3)
        path = self.dir / 'round.mtx'
        write_matrix_market(path, original, comment='round trip')
        problem = ingest_matrix_market(path)
        np.testing.assert_array_equal(problem.rows, original.rows)
        np.testing.assert_array_equal(problem.cols, original.cols)
        np.testing.assert_array_equal(problem.vals, original.vals)
        np.testing.assert_array_equal(problem.D, original.D)
        np.testing.assert_array_equal(problem.to_dense(), original.to_dense())

    def test_general_header_rejected(self):
        """Test a general matrix raises NotSymmetricHeader."""
        with self.assertRaises(NotSymmetricHeader) as ctx:
            ingest_matrix_market(self.write('general.mtx', GENERAL))
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_unreadable_files(self):
        """Test dense, garbage and missing files raise ParseError."""
        with self.assertRaises(ParseError):
            ingest_matrix_market(self.write('dense.mtx', DENSE))
        with self.assertRaises(ParseError):
            ingest_matrix_market(self.write('junk.mtx', 'not a matrix\n'))
        with self.assertRaises(ParseError):
            ingest_matrix_market(self.dir / 'missing.mtx')
