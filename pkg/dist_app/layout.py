"""Triangular partition of a half-stored symmetric matrix over ranks.

The rows and columns of H are cut into ``n_d`` (odd) sub-blocks. Grid block
``(r, c)`` is stored iff ``(r - c) mod n_d <= (n_d - 1) / 2``, which keeps
``n_d (n_d + 1) / 2`` blocks: the lower wedge near the diagonal plus the
transposed images of the blocks furthest below it. Every grid row and grid
column then holds ``(n_d + 1) / 2`` stored blocks.

Ranks are numbered column by column. Column ``c`` is walked from its
diagonal block ``(c, c)`` downward, wrapping past the last row, so the
diagonal ranks are the multiples of ``(n_d + 1) / 2``.
"""

# Standard library
import logging
from dataclasses import dataclass
from functools import cached_property

# Third-party imports
import numpy as np

# Local imports
from spmm_app.exceptions import DimensionMismatch

from .exceptions import EvenNd

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankBlock:
    """The grid block held by one rank.

    Attributes:
        rank (int): Rank id.
        row (int): Grid row, the rank's row group.
        col (int): Grid column, the rank's column group.
    """

    rank: int
    row: int
    col: int

    @property
    def transposed(self):
        """True for upper grid blocks, stored as the transpose of a lower one."""
        return self.row < self.col

    @property
    def diagonal(self):
        return self.row == self.col

    @property
    def lower(self):
        """Coordinates ``(i, j)`` with ``i >= j`` of the lower block it carries."""
        return (self.col, self.row) if self.transposed else (self.row, self.col)


def is_stored(n_d, row, col):
    return (row - col) % n_d <= (n_d - 1) // 2


def even_boundaries(n, parts):
    """Split ``[0, n)`` into ``parts`` nearly equal ranges."""
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), parts)]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class TriangularLayout:
    """Rank map, process groups and vector segmentation.

    Attributes:
        n_d (int): Odd partition count.
        boundaries (np.ndarray): Sub-block boundaries, length ``n_d + 1``.
        blocks (tuple[RankBlock]): Indexed by rank.
        row_groups (tuple[tuple[int]]): Ranks per grid row, ascending.
        col_groups (tuple[tuple[int]]): Ranks per grid column, diagonal first.
        diagonal_ranks (tuple[int]): Rank holding ``H[i, i]`` per ``i``.
        vector_segments (tuple): For every sub-vector ``i`` the
            ``(rank, start, stop)`` global row ranges over column group ``i``.
    """

    n_d: int
    boundaries: np.ndarray
    blocks: tuple
    row_groups: tuple
    col_groups: tuple
    diagonal_ranks: tuple
    vector_segments: tuple

    @property
    def n_ranks(self):
        return len(self.blocks)

    @property
    def group_size(self):
        return (self.n_d + 1) // 2

    @property
    def n(self):
        return int(self.boundaries[-1])

    @cached_property
    def _grid(self):
        return {(b.row, b.col): b.rank for b in self.blocks}

    def rank_at(self, row, col):
        """Rank storing grid block ``(row, col)``, or None."""
        return self._grid.get((row, col))

    def owner_of_lower(self, i, j):
        """Rank and transpose flag for lower grid block ``(i, j)``, ``i >= j``."""
        rank = self.rank_at(i, j)
        if rank is not None:
            return rank, False
        return self.rank_at(j, i), True

    @cached_property
    def _segment_by_rank(self):
        return {
            rank: (i, start, stop)
            for i, segments in enumerate(self.vector_segments)
            for rank, start, stop in segments
        }

    def segment_of(self, rank):
        """``(sub_vector, start, stop)`` of the vector rows owned by ``rank``."""
        return self._segment_by_rank[rank]

    def block_range(self, i):
        return int(self.boundaries[i]), int(self.boundaries[i + 1])

    def to_dict(self):
        """JSON-ready description of the layout."""
        return {
            'n_d': self.n_d,
            'n': self.n,
            'n_ranks': self.n_ranks,
            'group_size': self.group_size,
            'boundaries': [int(b) for b in self.boundaries],
            'ranks': [
                {
                    'rank': b.rank,
                    'row': b.row,
                    'col': b.col,
                    'lower_block': list(b.lower),
                    'transposed': b.transposed,
                    'diagonal': b.diagonal,
                }
                for b in self.blocks
            ],
            'row_groups': [list(g) for g in self.row_groups],
            'col_groups': [list(g) for g in self.col_groups],
            'diagonal_ranks': list(self.diagonal_ranks),
            'segments': [
                [{'rank': rank, 'start': start, 'stop': stop} for rank, start, stop in segs]
                for segs in self.vector_segments
            ],
        }


def build_layout(n_d, n=None, boundaries=None):
    """Build the triangular layout for ``n_d`` sub-blocks.

    Args:
        n_d (int): Odd partition count, at least 1.
        n (int or None): Matrix dimension, split evenly when no boundaries
            are given. Defaults to one row per vector segment.
        boundaries (array-like or None): Explicit sub-block boundaries.

    Returns:
        TriangularLayout: The layout.

    Raises:
        EvenNd: ``n_d`` is even or smaller than 1.
        DimensionMismatch: Boundaries do not fit ``n_d`` or ``n``.
    """
    if n_d < 1 or n_d % 2 == 0:
        raise EvenNd(f"n_d must be an odd positive integer, got {n_d}.")
    half = (n_d - 1) // 2
    if boundaries is None:
        n = n_d * (half + 1) if n is None else int(n)
        if n < n_d:
            raise DimensionMismatch(f"Cannot split {n} rows into {n_d} sub-blocks.")
        boundaries = even_boundaries(n, n_d)
    boundaries = np.asarray(boundaries, dtype=np.int64)
    if boundaries.shape != (n_d + 1,) or boundaries[0] != 0 or np.any(np.diff(boundaries) < 0):
        raise DimensionMismatch(f"Expected {n_d + 1} non-decreasing boundaries from 0.")
    if n is not None and boundaries[-1] != n:
        raise DimensionMismatch(f"Boundaries end at {boundaries[-1]}, not {n}.")

    blocks = []
    for col in range(n_d):
        for step in range(half + 1):
            blocks.append(RankBlock(len(blocks), (col + step) % n_d, col))

    row_groups = tuple(
        tuple(sorted(b.rank for b in blocks if b.row == r)) for r in range(n_d)
    )
    col_groups = tuple(
        tuple(b.rank for b in blocks if b.col == c) for c in range(n_d)
    )
    diagonal_ranks = tuple(c * (half + 1) for c in range(n_d))

    segments = []
    for i, members in enumerate(col_groups):
        start, stop = int(boundaries[i]), int(boundaries[i + 1])
        cuts = even_boundaries(stop - start, len(members)) + start
        segments.append(tuple(
            (rank, int(cuts[s]), int(cuts[s + 1])) for s, rank in enumerate(members)
        ))

    layout = TriangularLayout(
        n_d=n_d,
        boundaries=boundaries,
        blocks=tuple(blocks),
        row_groups=row_groups,
        col_groups=col_groups,
        diagonal_ranks=diagonal_ranks,
        vector_segments=tuple(segments),
    )
    logger.debug("Built layout n_d=%d with %d ranks over n=%d", n_d, layout.n_ranks, layout.n)
    return layout
