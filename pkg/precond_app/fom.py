"""Block-diagonal preconditioning by a few Lanczos-FOM steps per tile."""

# Standard library
import logging
import threading
import warnings
from dataclasses import dataclass, field

# Third-party imports
import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

# Local imports
from core.parallel import run_tasks
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch
from spmm_app.matrix import MAX_BLOCK_EXTENT

from .exceptions import InvalidFomConfig, SingularProjection
from .tiles import shifted_tile

logger = logging.getLogger(__name__)

DEFAULT_FOM_ITERATIONS = 4
BREAKDOWN_TOL = 1e-14
PIVOT_TOL = 1e-14


@dataclass(frozen=True)
class FomConfig:
    """Krylov step count and per-column shifts.

    Attributes:
        iterations (int): Lanczos steps per solve.
        shifts (tuple[float]): One shift per right-hand-side column, used
            when no Ritz values are supplied.
    """

    iterations: int = DEFAULT_FOM_ITERATIONS
    shifts: tuple = ()

    def __post_init__(self):
        if not 1 <= self.iterations <= MAX_BLOCK_EXTENT:
            raise InvalidFomConfig(f"FOM iterations must be in [1, {MAX_BLOCK_EXTENT}].")
        object.__setattr__(self, 'shifts', tuple(float(s) for s in self.shifts))
        if not all(np.isfinite(self.shifts)):
            raise InvalidFomConfig("FOM shifts must be finite.")


@dataclass
class FomStats:
    """Counters accumulated over preconditioner applications."""

    solves: int = 0
    fallbacks: int = 0
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False
    )

    def record(self, solves, fallbacks):
        with self._lock:
            self.solves += solves
            self.fallbacks += fallbacks


def column_shifts(theta, nvec, k=None):
    """Shift for every block column from the current Ritz values.

    Column ``v`` uses ``theta[min(v, k - 1)]``; columns past the ``k``
    sought pairs reuse the last one.

    Args:
        theta (array-like): Ritz values, ascending.
        nvec (int): Block width.
        k (int or None): Number of sought pairs, ``len(theta)`` if None.

    Returns:
        np.ndarray: ``nvec`` shifts.
    """
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    k = theta.size if k is None else min(k, theta.size)
    return theta[np.minimum(np.arange(nvec), k - 1)]


def fom_solve_column(A, r, m):
    """m-step Lanczos-FOM approximation to ``inv(A) @ r`` for symmetric A.

    Args:
        A (scipy.sparse matrix): Already shifted tile.
        r (np.ndarray): Right-hand side.
        m (int): Maximum Krylov dimension.

    Returns:
        np.ndarray: Approximate solution.

    Raises:
        SingularProjection: The projected tridiagonal matrix is singular.
    """
    d = A.shape[0]
    beta0 = float(np.linalg.norm(r))
    if beta0 == 0.0:
        return np.zeros(d)
    steps = min(m, d)
    V = np.zeros((d, steps))
    alpha = np.zeros(steps)
    beta = np.zeros(steps)
    V[:, 0] = r / beta0
    used = steps
    for j in range(steps):
        w = A @ V[:, j]
        if j > 0:
            w -= beta[j - 1] * V[:, j - 1]
        alpha[j] = V[:, j] @ w
        w -= alpha[j] * V[:, j]
        w -= V[:, :j + 1] @ (V[:, :j + 1].T @ w)
        if j == steps - 1:
            break
        b = float(np.linalg.norm(w))
        if b < BREAKDOWN_TOL * beta0:
            used = j + 1
            break
        beta[j] = b
        V[:, j + 1] = w / b

    T = np.diag(alpha[:used])
    if used > 1:
        off = beta[:used - 1]
        T += np.diag(off, 1) + np.diag(off, -1)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(T, check_finite=False)
    scale = max(1.0, float(np.abs(T).max()))
    if np.abs(np.diag(lu)).min() < PIVOT_TOL * scale:
        raise SingularProjection("Shift coincides with an eigenvalue of the tile.")
    rhs = np.zeros(used)
    rhs[0] = beta0
    return V[:, :used] @ lu_solve((lu, piv), rhs, check_finite=False)


def fom_solve_tile(K, sigma, R, m=DEFAULT_FOM_ITERATIONS, fallback_columns=None):
    """Solve ``(K - sigma_v I) w_v = r_v`` for every column ``v`` of ``R``.

    Args:
        K: Symmetric tile (sparse or dense).
        sigma (float or array-like): Shift per column.
        R (np.ndarray): Tile rows of the residual block.
        m (int): Krylov steps.
        fallback_columns (list or None): When given, a column whose
            projection is singular is returned unchanged and its index is
            appended here instead of raising.

    Returns:
        np.ndarray: Tile rows of the preconditioned block.

    Raises:
        SingularProjection: For the first column whose projection is
            singular when ``fallback_columns`` is None; ``column`` holds
            its index.
    """
    R = as_array(R)
    sigmas = np.broadcast_to(np.asarray(sigma, dtype=np.float64), (R.shape[1],))
    if R.shape[0] != K.shape[0]:
        raise DimensionMismatch(f"Tile of size {K.shape[0]} with {R.shape[0]} residual rows.")
    out = np.empty_like(R)
    for v in range(R.shape[1]):
        try:
            out[:, v] = fom_solve_column(shifted_tile(K, sigmas[v]), R[:, v], m)
        except SingularProjection as exc:
            if fallback_columns is None:
                exc.column = v
                raise
            out[:, v] = R[:, v]
            fallback_columns.append(v)
    return out


def apply_preconditioner(tiles, theta, R, cfg=None, k=None, workers=1, stats=None):
    """Apply the block-diagonal preconditioner ``K^-1`` to ``R``.

    Each tile is solved independently and writes a disjoint row range, so
    the result does not depend on tile order. A column whose projection
    is singular is returned unpreconditioned and counted in ``stats``.

    Args:
        tiles (DiagonalTileSet): Diagonal tiles of H.
        theta (array-like or None): Current Ritz values; None uses
            ``cfg.shifts``.
        R (BlockVector): Residual block.
        cfg (FomConfig): Iteration count and fallback shifts.
        k (int or None): Number of sought pairs for the shift policy.
        workers (int): Thread count over tiles.
        stats (FomStats or None): Counters to update.

    Returns:
        BlockVector: ``K^-1 R`` approximated tile by tile.
    """
    cfg = cfg or FomConfig()
    r = as_array(R)
    if r.shape[0] != tiles.n:
        raise DimensionMismatch(f"Residual has {r.shape[0]} rows, tiles cover {tiles.n}.")
    if theta is None:
        sigmas = np.asarray(cfg.shifts, dtype=np.float64)
        if sigmas.size != r.shape[1]:
            raise DimensionMismatch(f"{sigmas.size} shifts for {r.shape[1]} columns.")
    else:
        sigmas = column_shifts(theta, r.shape[1], k)
    W = np.empty_like(r)

    def tile_task(j):
        a, b = tiles.tile_range(j)
        raw = []
        W[a:b] = fom_solve_tile(
            tiles.tiles[j], sigmas, r[a:b], cfg.iterations, fallback_columns=raw
        )
        return len(raw)

    fallbacks = sum(run_tasks(tile_task, range(tiles.b), workers))
    if fallbacks:
        logger.warning("Preconditioner fell back to the raw residual for %d columns", fallbacks)
    if stats is not None:
        stats.record(tiles.b * r.shape[1], fallbacks)
    return BlockVector(W)
