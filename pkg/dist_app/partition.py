"""Scatter a half-stored matrix and block vectors over the layout."""

# Standard library
import logging
from dataclasses import dataclass

# Third-party imports
import numpy as np

# Local imports
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch, IndexOutOfRange, NotStrictlyLower
from spmm_app.matrix import DEFAULT_BLOCK_SIZE, csb_from_arrays, uniform_boundaries

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """Matrix data of one rank.

    Attributes:
        block (RankBlock): Grid position.
        matrix (CsbCooMatrix): Grid block ``H[row, col]`` in local
            coordinates; strictly lower for a diagonal rank.
        diagonal (np.ndarray or None): Diagonal slice, diagonal ranks only.
    """

    block: object
    matrix: object
    diagonal: object = None

    @property
    def rank(self):
        return self.block.rank

    @property
    def nnz(self):
        """Stored off-diagonal nonzeros."""
        return self.matrix.nnz


def partition_matrix(rows, cols, vals, D, layout, block_size=DEFAULT_BLOCK_SIZE):
    """Distribute the strictly lower triangle and the diagonal to the ranks.

    Entries whose lower grid block is stored transposed are transposed on
    ingest, so every rank holds the grid block ``H[row, col]`` it owns.

    Args:
        rows, cols, vals (array-like): Strictly lower COO entries.
        D (array-like): Diagonal, length ``layout.n``.
        layout (TriangularLayout): Target layout.
        block_size (int): CSB block extent inside every rank.

    Returns:
        list[RankMatrix]: Indexed by rank.

    Raises:
        NotStrictlyLower: An entry has ``row <= col``.
        IndexOutOfRange: An entry lies outside the layout.
        DimensionMismatch: ``D`` does not match the layout.
    """
    rows = np.asarray(rows, dtype=np.int64).reshape(-1)
    cols = np.asarray(cols, dtype=np.int64).reshape(-1)
    vals = np.asarray(vals, dtype=np.float64).reshape(-1)
    D = np.asarray(D, dtype=np.float64).reshape(-1)
    if D.size != layout.n:
        raise DimensionMismatch(f"Diagonal of length {D.size} for n={layout.n}.")
    if np.any(rows <= cols):
        raise NotStrictlyLower("Partitioned entries must lie strictly below the diagonal.")
    if rows.size and (rows.max() >= layout.n or cols.min() < 0):
        raise IndexOutOfRange(f"Entries fall outside the {layout.n}x{layout.n} matrix.")

    bounds = layout.boundaries
    bi = np.searchsorted(bounds, rows, side='right') - 1
    bj = np.searchsorted(bounds, cols, side='right') - 1

    parts = []
    for block in layout.blocks:
        i, j = block.lower
        mine = (bi == i) & (bj == j)
        r_loc = rows[mine] - bounds[i]
        c_loc = cols[mine] - bounds[j]
        if block.transposed:
            r_loc, c_loc = c_loc, r_loc
        row_size = int(bounds[block.row + 1] - bounds[block.row])
        col_size = int(bounds[block.col + 1] - bounds[block.col])
        matrix = csb_from_arrays(
            r_loc, c_loc, vals[mine], row_size, col_size,
            uniform_boundaries(row_size, block_size), uniform_boundaries(col_size, block_size),
        )
        diagonal = None
        if block.diagonal:
            a, b = layout.block_range(block.row)
            diagonal = D[a:b].copy()
        parts.append(RankMatrix(block, matrix, diagonal))
    logger.debug("Partitioned %d entries over %d ranks", vals.size, len(parts))
    return parts


def assemble_lower(parts, layout):
    """Undo :func:`partition_matrix`.

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]: Global
        ``(rows, cols, vals)`` of the strictly lower triangle sorted by
        ``(row, col)``, and the diagonal.
    """
    bounds = layout.boundaries
    rows, cols, vals = [], [], []
    D = np.zeros(layout.n)
    for part in parts:
        block = part.block
        r, c, v = part.matrix.to_coo()
        if block.transposed:
            r, c = c, r
        i, j = block.lower
        rows.append(r + bounds[i])
        cols.append(c + bounds[j])
        vals.append(v)
        if part.diagonal is not None:
            a, b = layout.block_range(block.row)
            D[a:b] = part.diagonal
    rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    order = np.lexsort((cols, rows))
    return rows[order], cols[order], vals[order], D


def partition_vectors(V, layout):
    """Hand every rank its segment of the block ``V``.

    Returns:
        dict: Rank to a copy of its rows of ``V``.
    """
    v = as_array(V)
    if v.shape[0] != layout.n:
        raise DimensionMismatch(f"Block has {v.shape[0]} rows, layout covers {layout.n}.")
    return {
        rank: v[start:stop].copy()
        for segments in layout.vector_segments
        for rank, start, stop in segments
    }


def gather_solution(segments, layout):
    """Reassemble a block from per-rank segments.

    Returns:
        BlockVector: The global block.
    """
    if set(segments) != set(range(layout.n_ranks)):
        raise DimensionMismatch("Every rank must contribute its segment.")
    nvec = as_array(next(iter(segments.values()))).shape[1]
    out = np.empty((layout.n, nvec))
    for rank, piece in segments.items():
        _, start, stop = layout.segment_of(rank)
        piece = as_array(piece)
        if piece.shape != (stop - start, nvec):
            raise DimensionMismatch(
                f"Rank {rank} returned {piece.shape}, expected {(stop - start, nvec)}."
            )
        out[start:stop] = piece
    return BlockVector(out)


def nnz_balance(parts):
    """Stored nonzeros per rank and the max-over-mean imbalance.

    Returns:
        dict: ``per_rank`` counts, ``max``, ``mean`` and ``imbalance``.
    """
    counts = np.array([part.nnz for part in parts], dtype=np.int64)
    mean = float(counts.mean())
    return {
        'per_rank': counts.tolist(),
        'max': int(counts.max()),
        'mean': mean,
        'imbalance': float(counts.max() / mean) if mean else 1.0,
    }
