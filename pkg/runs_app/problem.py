"""A half-stored symmetric problem as read or generated by the commands."""

# Standard library
from dataclasses import dataclass

# Third-party imports
import numpy as np

# Local imports
from spmm_app.matrix import DEFAULT_BLOCK_SIZE, csb_from_arrays, uniform_boundaries


@dataclass(eq=False)
class Problem:
    """Strictly lower COO triangle, diagonal and optional tile offsets.

    Attributes:
        rows, cols (np.ndarray): Coordinates with ``rows > cols``.
        vals (np.ndarray): Values.
        D (np.ndarray): Diagonal.
        tile_offsets (np.ndarray or None): Diagonal tile boundaries.
        source (str): Where the problem came from, for the report.
    """

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    D: np.ndarray
    tile_offsets: np.ndarray = None
    source: str = ''

    @property
    def n(self):
        return int(self.D.size)

    @property
    def nnz(self):
        """Stored entries of the full symmetric matrix."""
        return int(2 * self.vals.size + np.count_nonzero(self.D))

    def csb(self, block_size=DEFAULT_BLOCK_SIZE):
        """The strictly lower triangle as a CsbCooMatrix."""
        bounds = uniform_boundaries(self.n, block_size)
        return csb_from_arrays(self.rows, self.cols, self.vals, self.n, self.n, bounds, bounds)

    def to_dense(self):
        """Full symmetric matrix, for tests and small problems only."""
        H = np.zeros((self.n, self.n))
        H[self.rows, self.cols] = self.vals
        H = H + H.T
        H[np.diag_indices(self.n)] = self.D
        return H
