"""Diagonal tiles of a half-stored symmetric matrix."""

# Standard library
import logging
from dataclasses import dataclass, field

# Third-party imports
import numpy as np
import scipy.sparse as sp

# Local imports
from .exceptions import InvalidTiles, MisalignedTiles

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiagonalTileSet:
    """Square symmetric tiles sitting on the diagonal of ``H``.

    Attributes:
        tile_offsets (np.ndarray): First global row of every tile, length
            ``b + 1``, ending at the matrix dimension.
        tiles (list[scipy.sparse.csr_matrix]): Tile ``j`` holds both
            triangles and the full diagonal of rows
            ``tile_offsets[j]:tile_offsets[j + 1]``.
    """

    tile_offsets: np.ndarray
    tiles: list = field(default_factory=list)

    def __post_init__(self):
        offsets = np.asarray(self.tile_offsets, dtype=np.int64)
        object.__setattr__(self, 'tile_offsets', offsets)
        check_tile_offsets(offsets)
        if len(self.tiles) != len(offsets) - 1:
            raise InvalidTiles(
                f"{len(self.tiles)} tiles for {len(offsets) - 1} tile ranges."
            )
        for j, tile in enumerate(self.tiles):
            size = int(offsets[j + 1] - offsets[j])
            if tile.shape != (size, size):
                raise InvalidTiles(f"Tile {j} has shape {tile.shape}, expected {size}.")

    @property
    def b(self):
        return len(self.tiles)

    @property
    def n(self):
        return int(self.tile_offsets[-1])

    def sizes(self):
        return np.diff(self.tile_offsets)

    def tile_range(self, j):
        return int(self.tile_offsets[j]), int(self.tile_offsets[j + 1])


def check_tile_offsets(offsets):
    """Raise InvalidTiles unless offsets run strictly upward from 0."""
    offsets = np.asarray(offsets)
    if offsets.ndim != 1 or offsets.size < 2 or offsets[0] != 0:
        raise InvalidTiles("Tile offsets must start at 0 and hold at least one tile.")
    if np.any(np.diff(offsets) <= 0):
        raise InvalidTiles("Tile offsets must be strictly increasing.")


def extract_tiles(L, D, tile_offsets, block_offsets=None):
    """Cut the diagonal tiles out of ``L + L.T + diag(D)``.

    Entries coupling two different tiles are dropped.

    Args:
        L (CsbCooMatrix): Strictly lower triangle.
        D (array-like): Diagonal values.
        tile_offsets (array-like): Tile boundaries ending at ``L.nrows``.
        block_offsets (array-like or None): Diagonal block boundaries the
            tiles must nest in; defaults to the row blocking of ``L``.

    Returns:
        DiagonalTileSet: The tiles.

    Raises:
        MisalignedTiles: A tile crosses a block boundary.
        InvalidTiles: Offsets are malformed or do not end at ``n``.
    """
    D = np.asarray(D, dtype=np.float64).reshape(-1)
    offsets = np.asarray(tile_offsets, dtype=np.int64)
    check_tile_offsets(offsets)
    n = L.nrows
    if offsets[-1] != n or D.size != n:
        raise InvalidTiles(f"Tiles end at {offsets[-1]}, matrix has {n} rows.")

    blocks = np.asarray(L.row_offsets if block_offsets is None else block_offsets)
    first = np.searchsorted(blocks, offsets[:-1], side='right')
    last = np.searchsorted(blocks, offsets[1:] - 1, side='right')
    straddling = np.nonzero(first != last)[0]
    if straddling.size:
        j = int(straddling[0])
        raise MisalignedTiles(
            f"Tile {j} [{offsets[j]}, {offsets[j + 1]}) crosses a block boundary."
        )

    rows, cols, vals = L.to_coo()
    tile_of_row = np.searchsorted(offsets, rows, side='right') - 1
    tile_of_col = np.searchsorted(offsets, cols, side='right') - 1
    inside = tile_of_row == tile_of_col
    rows, cols, vals, owner = rows[inside], cols[inside], vals[inside], tile_of_row[inside]
    order = np.argsort(owner, kind='stable')
    rows, cols, vals, owner = rows[order], cols[order], vals[order], owner[order]
    bounds = np.searchsorted(owner, np.arange(len(offsets)))

    tiles = []
    for j in range(len(offsets) - 1):
        a, b = int(offsets[j]), int(offsets[j + 1])
        s, e = bounds[j], bounds[j + 1]
        r, c, v = rows[s:e] - a, cols[s:e] - a, vals[s:e]
        diag = np.arange(b - a)
        tile = sp.csr_matrix(
            (np.concatenate([v, v, D[a:b]]),
             (np.concatenate([r, c, diag]), np.concatenate([c, r, diag]))),
            shape=(b - a, b - a),
        )
        tiles.append(tile)
    logger.debug("Extracted %d diagonal tiles from %d rows", len(tiles), n)
    return DiagonalTileSet(offsets, tiles)


def shifted_tile(tile, sigma):
    """Return ``tile - sigma * I`` with the sparsity pattern unchanged.

    Args:
        tile: Square sparse (or dense) matrix.
        sigma (float): Shift.

    Returns:
        scipy.sparse.csr_matrix: The shifted tile.
    """
    shifted = sp.csr_matrix(tile, dtype=np.float64, copy=True)
    shifted.setdiag(shifted.diagonal() - sigma)
    return shifted


def random_tile_offsets(block_offsets, min_size=1, max_size=64, seed=None):
    """Draw tile boundaries nested in the given blocks.

    Tile sizes are log-uniform between ``min_size`` and ``max_size``, which
    yields many small tiles and a few large ones.

    Args:
        block_offsets (array-like): Block boundaries to nest in.
        min_size (int): Smallest tile.
        max_size (int): Largest tile.
        seed (int or None): RNG seed.

    Returns:
        np.ndarray: Tile offsets.
    """
    if not 1 <= min_size <= max_size:
        raise InvalidTiles(f"Bad tile size range [{min_size}, {max_size}].")
    rng = np.random.default_rng(seed)
    offsets = [0]
    blocks = np.asarray(block_offsets, dtype=np.int64)
    for start, stop in zip(blocks[:-1], blocks[1:]):
        pos = int(start)
        while pos < stop:
            size = int(round(np.exp(rng.uniform(np.log(min_size), np.log(max_size)))))
            pos = min(int(stop), pos + max(1, size))
            offsets.append(pos)
    return np.asarray(offsets, dtype=np.int64)


def tile_statistics(tileset):
    """Tile count and a power-of-two size histogram.

    Args:
        tileset (DiagonalTileSet): Tiles to summarize.

    Returns:
        dict: ``count``, ``min_size``, ``max_size``, ``mean_size`` and
        ``histogram`` as a list of ``{'lower', 'upper', 'count'}`` bins.
    """
    sizes = tileset.sizes()
    top = int(np.ceil(np.log2(sizes.max() + 1)))
    edges = 2 ** np.arange(top + 1)
    counts, _ = np.histogram(sizes, bins=edges)
    return {
        'count': int(sizes.size),
        'min_size': int(sizes.min()),
        'max_size': int(sizes.max()),
        'mean_size': float(sizes.mean()),
        'histogram': [
            {'lower': int(lo), 'upper': int(hi), 'count': int(c)}
            for lo, hi, c in zip(edges[:-1], edges[1:], counts)
        ],
    }
