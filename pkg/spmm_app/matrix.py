"""Compressed Sparse Block storage with coordinate blocks (CSB_Coo)."""

# Standard library
from dataclasses import dataclass
from functools import cached_property

# Third-party imports
import numpy as np

# Local imports
from .exceptions import BlockTooLarge, DuplicateEntry, IndexOutOfRange

# Local indices are stored in 2 bytes.
MAX_BLOCK_EXTENT = 32000
DEFAULT_BLOCK_SIZE = 4000


def uniform_boundaries(n, block_size=DEFAULT_BLOCK_SIZE):
    """Split ``[0, n)`` into consecutive blocks of ``block_size`` rows.

    Args:
        n (int): Dimension to split.
        block_size (int): Extent of every block but possibly the last.

    Returns:
        list[int]: Boundaries ``[0, b, 2b, ..., n]``.
    """
    if block_size < 1:
        raise BlockTooLarge(f"Block size must be positive, got {block_size}.")
    bounds = list(range(0, n, block_size))
    bounds.append(n)
    if bounds[0] != 0:
        bounds.insert(0, 0)
    return bounds


def check_boundaries(bounds, extent, axis):
    """Validate block boundaries running from 0 to ``extent`` and return them as int64."""
    bounds = np.asarray(bounds, dtype=np.int64)
    if bounds.ndim != 1 or bounds.size < 2 or bounds[0] != 0 or bounds[-1] != extent:
        raise IndexOutOfRange(
            f"{axis} block boundaries must run from 0 to {extent}, got {bounds.tolist()}."
        )
    widths = np.diff(bounds)
    if np.any(widths < 0):
        raise IndexOutOfRange(f"{axis} block boundaries must be non-decreasing.")
    if np.any(widths > MAX_BLOCK_EXTENT):
        raise BlockTooLarge(
            f"{axis} block of extent {int(widths.max())} exceeds {MAX_BLOCK_EXTENT}."
        )
    return bounds


@dataclass(frozen=True, eq=False)
class CsbCooMatrix:
    """Block-partitioned sparse matrix with per-block coordinate triples.

    Nonzeros are grouped by block in row-major block order. Inside a block
    they keep the order in which they were given.

    Attributes:
        nrows (int): Global row count.
        ncols (int): Global column count.
        row_offsets (np.ndarray): First global row of every row block,
            length ``nrowblks + 1``.
        col_offsets (np.ndarray): First global column of every column block,
            length ``ncolblks + 1``.
        block_nnz (np.ndarray): ``nrowblks x ncolblks`` nonzero counts.
        block_nnz_offsets (np.ndarray): Exclusive prefix sums of
            ``block_nnz`` in row-major scan order.
        local_rows (np.ndarray): uint16 row index inside the owning block.
        local_cols (np.ndarray): uint16 column index inside the owning block.
        values (np.ndarray): float64 values.
    """

    nrows: int
    ncols: int
    row_offsets: np.ndarray
    col_offsets: np.ndarray
    block_nnz: np.ndarray
    block_nnz_offsets: np.ndarray
    local_rows: np.ndarray
    local_cols: np.ndarray
    values: np.ndarray

    @property
    def nrowblks(self):
        return len(self.row_offsets) - 1

    @property
    def ncolblks(self):
        return len(self.col_offsets) - 1

    @property
    def nnz(self):
        return int(self.values.size)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def block_range(self, i, j):
        """Return the ``[start, stop)`` slice of block ``(i, j)``."""
        start = int(self.block_nnz_offsets[i, j])
        return start, start + int(self.block_nnz[i, j])

    def nonzero_blocks(self):
        """List ``(i, j, start, stop)`` for every block holding nonzeros.

        Returns:
            list[tuple[int, int, int, int]]: In row-major block order.
        """
        blocks = []
        for i, j in zip(*np.nonzero(self.block_nnz)):
            start, stop = self.block_range(i, j)
            blocks.append((int(i), int(j), start, stop))
        return blocks

    @cached_property
    def block_index(self):
        """Row-block and column-block id of every stored nonzero."""
        flat_ids = np.repeat(
            np.arange(self.block_nnz.size), self.block_nnz.reshape(-1)
        )
        return np.divmod(flat_ids, self.ncolblks)

    def to_coo(self):
        """Flatten back to global coordinates.

        Returns:
            tuple[np.ndarray, np.ndarray, np.ndarray]: ``(rows, cols, values)``
            in storage order.
        """
        bi, bj = self.block_index
        rows = self.row_offsets[bi] + self.local_rows.astype(np.int64)
        cols = self.col_offsets[bj] + self.local_cols.astype(np.int64)
        return rows, cols, self.values.copy()

    def transpose(self):
        """Return the explicitly transposed matrix with swapped blocking."""
        rows, cols, vals = self.to_coo()
        return csb_from_arrays(
            cols, rows, vals, self.ncols, self.nrows,
            self.col_offsets, self.row_offsets,
        )

    def to_dense(self):
        """Dense copy, for tests and small problems only."""
        dense = np.zeros(self.shape)
        rows, cols, vals = self.to_coo()
        dense[rows, cols] = vals
        return dense

    @cached_property
    def is_strictly_lower(self):
        rows, cols, _ = self.to_coo()
        return bool(np.all(rows > cols))

    def max_abs(self):
        return float(np.abs(self.values).max()) if self.nnz else 0.0

    def __repr__(self):
        return (
            f"CsbCooMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, "
            f"blocks={self.nrowblks}x{self.ncolblks})"
        )


def csb_from_arrays(rows, cols, values, nrows, ncols, block_rows, block_cols):
    """Build a CsbCooMatrix from parallel coordinate arrays.

    Args:
        rows, cols (array-like): Global coordinates.
        values (array-like): Nonzero values.
        nrows, ncols (int): Global dimensions.
        block_rows, block_cols (array-like): Block boundaries.

    Returns:
        CsbCooMatrix: The blocked matrix.

    Raises:
        BlockTooLarge: A block extent exceeds 32000.
        IndexOutOfRange: A coordinate is outside the matrix.
        DuplicateEntry: A coordinate appears twice.
    """
    row_offsets = check_boundaries(block_rows, nrows, 'Row')
    col_offsets = check_boundaries(block_cols, ncols, 'Column')
    rows = np.asarray(rows, dtype=np.int64).reshape(-1)
    cols = np.asarray(cols, dtype=np.int64).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if not rows.size == cols.size == values.size:
        raise IndexOutOfRange("Row, column and value arrays differ in length.")

    if rows.size:
        bad = (rows < 0) | (rows >= nrows) | (cols < 0) | (cols >= ncols)
        if bad.any():
            k = int(np.argmax(bad))
            raise IndexOutOfRange(
                f"Entry ({rows[k]}, {cols[k]}) outside {nrows}x{ncols} matrix."
            )
        keys = np.sort(rows * ncols + cols)
        dup = keys[1:] == keys[:-1]
        if dup.any():
            key = int(keys[1:][dup][0])
            raise DuplicateEntry(
                f"Coordinate ({key // ncols}, {key % ncols}) given more than once."
            )

    nrowblks = len(row_offsets) - 1
    ncolblks = len(col_offsets) - 1
    bi = np.searchsorted(row_offsets, rows, side='right') - 1
    bj = np.searchsorted(col_offsets, cols, side='right') - 1
    block_id = bi * ncolblks + bj
    order = np.argsort(block_id, kind='stable')

    counts = np.bincount(block_id, minlength=nrowblks * ncolblks)
    offsets = np.zeros_like(counts)
    offsets[1:] = np.cumsum(counts)[:-1]

    return CsbCooMatrix(
        nrows=int(nrows),
        ncols=int(ncols),
        row_offsets=row_offsets,
        col_offsets=col_offsets,
        block_nnz=counts.reshape(nrowblks, ncolblks).astype(np.int64),
        block_nnz_offsets=offsets.reshape(nrowblks, ncolblks).astype(np.int64),
        local_rows=(rows - row_offsets[bi])[order].astype(np.uint16),
        local_cols=(cols - col_offsets[bj])[order].astype(np.uint16),
        values=values[order],
    )


def build_csb_coo(triples, nrows, ncols, block_rows, block_cols):
    """Build a CsbCooMatrix from ``(row, col, value)`` triples.

    Args:
        triples (iterable): ``(row, col, value)`` tuples.
        nrows, ncols (int): Global dimensions.
        block_rows (list[int]): Row-block boundaries.
        block_cols (list[int]): Column-block boundaries.

    Returns:
        CsbCooMatrix: The blocked matrix.
    """
    triples = list(triples)
    if triples:
        rows, cols, values = (np.asarray(part) for part in zip(*triples))
    else:
        rows = cols = values = np.empty(0)
    return csb_from_arrays(rows, cols, values, nrows, ncols, block_rows, block_cols)
