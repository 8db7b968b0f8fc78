"""Binary cache files for CsbCooMatrix ("CSB1" format).

Layout, all little-endian: magic ``b'CSB1'``; u64 ``nrows, ncols,
nrowblks, ncolblks``; u64 row and column offset arrays; u64 ``block_nnz``
and ``block_nnz_offsets`` in row-major order; u16 ``(row, col)`` local index
pairs; f64 values.
"""

# Standard library
import logging
from pathlib import Path

# Third-party imports
import numpy as np

# Local imports
from core.exceptions import InputError

from .exceptions import CacheFormatError, IndexOutOfRange
from .matrix import check_boundaries, csb_from_arrays

logger = logging.getLogger(__name__)

MAGIC = b'CSB1'
_U64 = np.dtype('<u8')
_U16 = np.dtype('<u2')
_F64 = np.dtype('<f8')


def save_csb(matrix, path):
    """Write ``matrix`` to ``path`` in the CSB1 format.

    Args:
        matrix (CsbCooMatrix): Matrix to store.
        path (str or Path): Destination file.
    """
    pairs = np.empty((matrix.nnz, 2), dtype=_U16)
    pairs[:, 0] = matrix.local_rows
    pairs[:, 1] = matrix.local_cols
    header = np.array(
        [matrix.nrows, matrix.ncols, matrix.nrowblks, matrix.ncolblks], dtype=_U64
    )
    with open(path, 'wb') as fh:
        fh.write(MAGIC)
        for array, dtype in (
            (header, _U64),
            (matrix.row_offsets, _U64),
            (matrix.col_offsets, _U64),
            (matrix.block_nnz, _U64),
            (matrix.block_nnz_offsets, _U64),
            (pairs, _U16),
            (matrix.values, _F64),
        ):
            fh.write(np.ascontiguousarray(array, dtype=dtype).tobytes())
    logger.debug("Wrote %r to %s", matrix, path)


class _Reader:
    def __init__(self, raw):
        self.raw = raw
        self.pos = 0

    def take(self, dtype, count):
        nbytes = dtype.itemsize * count
        if self.pos + nbytes > len(self.raw):
            raise CacheFormatError("CSB cache file is truncated.")
        array = np.frombuffer(self.raw, dtype=dtype, count=count, offset=self.pos)
        self.pos += nbytes
        return array


def load_csb(path):
    """Read a CSB1 file written by :func:`save_csb`.

    Args:
        path (str or Path): Source file.

    Returns:
        CsbCooMatrix: The stored matrix.

    Raises:
        CacheFormatError: Wrong magic, truncation, trailing bytes or
            stored arrays that do not form a valid CSB matrix.
    """
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CacheFormatError(f"{path} is not a CSB1 cache file.")
    reader = _Reader(raw)
    reader.pos = 4
    nrows, ncols, nrowblks, ncolblks = (int(v) for v in reader.take(_U64, 4))
    row_offsets = reader.take(_U64, nrowblks + 1).astype(np.int64)
    col_offsets = reader.take(_U64, ncolblks + 1).astype(np.int64)
    nblocks = nrowblks * ncolblks
    block_nnz = reader.take(_U64, nblocks).astype(np.int64).reshape(nrowblks, ncolblks)
    block_offsets = reader.take(_U64, nblocks).astype(np.int64).reshape(nrowblks, ncolblks)
    nnz = int(block_nnz.sum())
    pairs = reader.take(_U16, 2 * nnz).reshape(nnz, 2)
    values = reader.take(_F64, nnz).astype(np.float64)
    if reader.pos != len(raw):
        raise CacheFormatError(f"{path} has {len(raw) - reader.pos} trailing bytes.")
    expected = np.zeros(nblocks, dtype=np.int64)
    expected[1:] = np.cumsum(block_nnz.ravel())[:-1]
    if not np.array_equal(block_offsets.ravel(), expected):
        raise CacheFormatError(f"{path} has block offsets that disagree with the counts.")
    try:
        return _rebuild(
            nrows, ncols, row_offsets, col_offsets, block_nnz,
            pairs[:, 0].astype(np.int64), pairs[:, 1].astype(np.int64), values,
        )
    except InputError as exc:
        raise CacheFormatError(f"{path} holds an invalid matrix: {exc}") from exc


def _rebuild(nrows, ncols, row_offsets, col_offsets, block_nnz, local_rows, local_cols, values):
    """Map local pairs back to global coordinates and re-block them with full checks."""
    nrowblks, ncolblks = block_nnz.shape
    row_offsets = check_boundaries(row_offsets, nrows, 'Row')
    col_offsets = check_boundaries(col_offsets, ncols, 'Column')
    owner = np.repeat(np.arange(nrowblks * ncolblks), block_nnz.ravel())
    bi, bj = owner // ncolblks, owner % ncolblks
    row_extent = np.diff(row_offsets)[bi]
    col_extent = np.diff(col_offsets)[bj]
    bad = (local_rows >= row_extent) | (local_cols >= col_extent)
    if bad.any():
        k = int(np.argmax(bad))
        raise IndexOutOfRange(
            f"Local index ({local_rows[k]}, {local_cols[k]}) outside block ({bi[k]}, {bj[k]})."
        )
    return csb_from_arrays(
        row_offsets[bi] + local_rows, col_offsets[bj] + local_cols, values,
        nrows, ncols, row_offsets, col_offsets,
    )
