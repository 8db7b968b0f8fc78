"""Seeded synthetic symmetric test matrices.

Every kind returns the strictly lower triangle, a fully populated diagonal
and tile offsets nested in the CSB blocks. ``blocktile`` clusters most of
its couplings inside the diagonal tiles; ``banded`` and ``random`` ignore
the tiles when placing entries.
"""

# Standard library
import logging

# Third-party imports
import numpy as np

# Local imports
from precond_app.tiles import random_tile_offsets
from spmm_app.matrix import DEFAULT_BLOCK_SIZE, uniform_boundaries

from .exceptions import BadParams
from .problem import Problem

logger = logging.getLogger(__name__)

KINDS = ('banded', 'blocktile', 'random')
MIN_DIMENSION = 10
TILE_DENSITY = 0.3


def _banded(n, bandwidth):
    rows, cols = [], []
    for d in range(1, min(bandwidth, n - 1) + 1):
        i = np.arange(d, n)
        rows.append(i)
        cols.append(i - d)
    if not rows:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(rows), np.concatenate(cols)


def _random_pairs(n, count, rng):
    """``count`` distinct strictly lower positions, uniformly drawn."""
    keys = np.empty(0, dtype=np.int64)
    while keys.size < count:
        draw = 2 * (count - keys.size) + 16
        i = rng.integers(0, n, size=draw)
        j = rng.integers(0, n, size=draw)
        keep = i != j
        hi, lo = np.maximum(i[keep], j[keep]), np.minimum(i[keep], j[keep])
        candidates = np.concatenate([keys, hi * n + lo])
        _, first = np.unique(candidates, return_index=True)
        keys = candidates[np.sort(first)]
    keys = keys[:count]
    return keys // n, keys % n


def _tile_pairs(offsets, rng):
    rows, cols = [], []
    for a, b in zip(offsets[:-1], offsets[1:]):
        r, c = np.tril_indices(int(b - a), -1)
        keep = rng.random(r.size) < TILE_DENSITY
        rows.append(r[keep] + a)
        cols.append(c[keep] + a)
    return np.concatenate(rows), np.concatenate(cols)


def generate_synthetic(kind, n, density=0.01, bandwidth=3, min_tile=1, max_tile=64,
                       block_size=DEFAULT_BLOCK_SIZE, seed=0, dominance=0.0):
    """Generate a symmetric test matrix.

    Off-diagonal values are standard normal. The diagonal is standard normal
    plus ``dominance`` times the absolute row sum of the off-diagonal part.

    Args:
        kind (str): ``'banded'``, ``'blocktile'`` or ``'random'``.
        n (int): Dimension, at least 10.
        density (float): Fraction of strictly lower positions filled
            (``random``), or the background fill (``blocktile``).
        bandwidth (int): Sub-diagonals filled by ``banded``.
        min_tile, max_tile (int): Tile size range, drawn log-uniformly.
        block_size (int): CSB block extent the tiles nest in.
        seed (int): RNG seed.
        dominance (float): Diagonal dominance factor.

    Returns:
        Problem: The matrix with its tile offsets.

    Raises:
        BadParams: A parameter is out of range.
    """
    if kind not in KINDS:
        raise BadParams(f"Unknown matrix kind {kind!r}, expected one of {', '.join(KINDS)}.")
    if n < MIN_DIMENSION:
        raise BadParams(f"n must be at least {MIN_DIMENSION}, got {n}.")
    if not 0.0 <= density <= 1.0:
        raise BadParams(f"density must lie in [0, 1], got {density}.")
    if bandwidth < 0:
        raise BadParams(f"bandwidth must be non-negative, got {bandwidth}.")
    if dominance < 0:
        raise BadParams(f"dominance must be non-negative, got {dominance}.")
    if not 1 <= min_tile <= max_tile:
        raise BadParams(f"Bad tile size range [{min_tile}, {max_tile}].")

    rng = np.random.default_rng(seed)
    offsets = random_tile_offsets(uniform_boundaries(n, block_size), min_tile, max_tile, seed=seed)

    if kind == 'banded':
        rows, cols = _banded(n, bandwidth)
    elif kind == 'random':
        rows, cols = _random_pairs(n, int(round(density * n * (n - 1) / 2)), rng)
    else:
        tile_rows, tile_cols = _tile_pairs(offsets, rng)
        bg_rows, bg_cols = _random_pairs(n, int(round(density * n * (n - 1) / 2)), rng)
        keys = np.unique(np.concatenate([tile_rows * n + tile_cols, bg_rows * n + bg_cols]))
        rows, cols = keys // n, keys % n

    order = np.lexsort((cols, rows))
    rows, cols = rows[order].astype(np.int64), cols[order].astype(np.int64)
    vals = rng.normal(size=rows.size)

    D = rng.normal(size=n)
    if dominance > 0:
        row_sums = np.bincount(rows, np.abs(vals), minlength=n) + np.bincount(
            cols, np.abs(vals), minlength=n
        )
        D = D + dominance * row_sums
    D[D == 0.0] = 1.0

    logger.info("Generated %s matrix n=%d with %d lower entries", kind, n, rows.size)
    return Problem(rows, cols, vals, D, tile_offsets=offsets, source=f"synthetic:{kind}")
