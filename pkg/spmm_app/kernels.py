"""Local SpMM and transpose SpMM kernels over CSB_Coo matrices.

Three parallel strategies are provided. ``Baseline`` gives every worker
whole output blocks, ``FusedAtomic`` makes every nonzero block its own task
and accumulates through per-block locks, and ``CacheBlocked`` additionally
streams each block through fixed-size staging buffers.
"""

# Standard library
import enum
import logging
import threading
from dataclasses import dataclass

# Third-party imports
import numpy as np

# Local imports
from core.parallel import run_tasks

from .blockvector import BlockVector, as_array
from .exceptions import DimensionMismatch, InvalidKernelVariant, NotStrictlyLower

logger = logging.getLogger(__name__)

DEFAULT_CACHE_SIZE = 256
DEFAULT_VECTOR_WIDTH = 256


class KernelTag(str, enum.Enum):
    BASELINE = 'Baseline'
    FUSED_ATOMIC = 'FusedAtomic'
    CACHE_BLOCKED = 'CacheBlocked'


@dataclass(frozen=True)
class KernelVariant:
    """Kernel selection plus the cache-blocking parameters.

    Attributes:
        tag (KernelTag): Which strategy to run.
        cache_size (int): Nonzeros staged per chunk (CacheBlocked only).
        vector_width (int): Lanes per staging step, nonzeros times vectors
            (CacheBlocked only).
    """

    tag: KernelTag = KernelTag.BASELINE
    cache_size: int = DEFAULT_CACHE_SIZE
    vector_width: int = DEFAULT_VECTOR_WIDTH

    def __post_init__(self):
        try:
            object.__setattr__(self, 'tag', KernelTag(self.tag))
        except ValueError as exc:
            raise InvalidKernelVariant(f"Unknown kernel variant {self.tag!r}.") from exc
        if self.cache_size < 1 or self.vector_width < 1:
            raise InvalidKernelVariant(
                "cache_size and vector_width must be positive."
            )

    @classmethod
    def baseline(cls):
        return cls(KernelTag.BASELINE)

    @classmethod
    def fused_atomic(cls):
        return cls(KernelTag.FUSED_ATOMIC)

    @classmethod
    def cache_blocked(cls, cache_size=DEFAULT_CACHE_SIZE, vector_width=DEFAULT_VECTOR_WIDTH):
        return cls(KernelTag.CACHE_BLOCKED, cache_size, vector_width)

    def label(self):
        """Short name used in benchmark tables."""
        if self.tag is KernelTag.CACHE_BLOCKED:
            return f"{self.tag.value}[cache={self.cache_size},vector={self.vector_width}]"
        return self.tag.value


def _segment_sum(index, contrib, length):
    """Sum the rows of ``contrib`` into ``length`` bins given by ``index``."""
    nvec = contrib.shape[1]
    keys = (np.asarray(index, dtype=np.int64)[:, None] * nvec + np.arange(nvec)).ravel()
    out = np.bincount(keys, weights=contrib.ravel(), minlength=length * nvec)
    return out.reshape(length, nvec)


class _Plan:
    """Role assignment of one multiply: which side is read, which is written."""

    def __init__(self, H, transpose):
        self.H = H
        self.transpose = transpose
        if transpose:
            self.out_local, self.in_local = H.local_cols, H.local_rows
            self.out_offsets, self.in_offsets = H.col_offsets, H.row_offsets
        else:
            self.out_local, self.in_local = H.local_rows, H.local_cols
            self.out_offsets, self.in_offsets = H.row_offsets, H.col_offsets

    def owner(self, i, j):
        return j if self.transpose else i

    def in_block(self, i, j):
        return i if self.transpose else j

    def out_extent(self, o):
        return int(self.out_offsets[o]), int(self.out_offsets[o + 1])

    def block_partial(self, W, i, j, start, stop):
        """Product of block (i, j) (or its transpose) with its input slice."""
        c0 = int(self.in_offsets[self.in_block(i, j)])
        r0, r1 = self.out_extent(self.owner(i, j))
        contrib = self.H.values[start:stop, None] * W[c0 + self.in_local[start:stop].astype(np.int64)]
        return _segment_sum(self.out_local[start:stop], contrib, r1 - r0)


def _check_operands(H, W, U, transpose):
    w, u = as_array(W), as_array(U)
    in_rows = H.nrows if transpose else H.ncols
    out_rows = H.ncols if transpose else H.nrows
    if w.shape[0] != in_rows or u.shape[0] != out_rows or w.shape[1] != u.shape[1]:
        raise DimensionMismatch(
            f"{'Transpose ' if transpose else ''}SpMM with {H.nrows}x{H.ncols} "
            f"matrix got input {w.shape} and output {u.shape}."
        )
    if np.shares_memory(w, u):
        raise DimensionMismatch("Input and output blocks must not alias.")
    return w, u


def _run_baseline(plan, W, U, workers):
    H = plan.H
    n_owners = H.ncolblks if plan.transpose else H.nrowblks

    def owner_task(o):
        r0, r1 = plan.out_extent(o)
        acc = np.zeros((r1 - r0, W.shape[1]))
        others = H.nrowblks if plan.transpose else H.ncolblks
        for other in range(others):
            i, j = (other, o) if plan.transpose else (o, other)
            start, stop = H.block_range(i, j)
            if stop > start:
                acc += plan.block_partial(W, i, j, start, stop)
        U[r0:r1] += acc

    run_tasks(owner_task, range(n_owners), workers)


def _run_fused(plan, W, U, workers, variant=None):
    """One task per nonzero block, partial sums added into ``U`` under a lock.

    Accumulation is not element-wise atomic: one lock guards each output
    block, and a block's partial is computed unlocked and then added in a
    single step while holding it.
    """
    H = plan.H
    n_owners = H.ncolblks if plan.transpose else H.nrowblks
    locks = [threading.Lock() for _ in range(n_owners)]
    nvec = W.shape[1]

    def block_task(entry):
        i, j, start, stop = entry
        o = plan.owner(i, j)
        r0, r1 = plan.out_extent(o)
        if variant is None:
            partial = plan.block_partial(W, i, j, start, stop)
        else:
            partial = _staged_partial(plan, W, i, j, start, stop, r1 - r0, nvec, variant)
        with locks[o]:
            U[r0:r1] += partial

    run_tasks(block_task, H.nonzero_blocks(), workers)


def staging_chunks(vector_width, nvec):
    """Number of ``cache_size`` chunks staged together in one vector step.

    A step covers ``chunks * cache_size`` nonzeros times ``nvec`` vectors,
    so a ``vector_width`` of at least ``nvec`` batches several chunks.
    """
    return max(1, vector_width // max(1, nvec))


def _staged_partial(plan, W, i, j, start, stop, out_len, nvec, variant):
    """Block product streamed through worker-private staging buffers.

    The buffers hold ``chunks x cache_size`` nonzeros; each step fills them
    from the block and accumulates them with one segmented sum.
    """
    H = plan.H
    c0 = int(plan.in_offsets[plan.in_block(i, j)])
    step = variant.cache_size * staging_chunks(variant.vector_width, nvec)
    capacity = min(step, stop - start)
    r_ar = np.empty(capacity, dtype=np.int64)
    c_ar = np.empty(capacity, dtype=np.int64)
    xcoef_ar = np.empty(capacity)
    partial = np.zeros((out_len, nvec))
    for chunk in range(start, stop, step):
        n = min(step, stop - chunk)
        r_ar[:n] = plan.out_local[chunk:chunk + n]
        c_ar[:n] = plan.in_local[chunk:chunk + n]
        xcoef_ar[:n] = H.values[chunk:chunk + n]
        rows = r_ar[:n]
        lo = int(rows.min())
        hi = int(rows.max()) + 1
        contrib = xcoef_ar[:n, None] * W[c0 + c_ar[:n]]
        partial[lo:hi] += _segment_sum(rows - lo, contrib, hi - lo)
    return partial


def _multiply(H, W, U, variant, transpose, workers):
    variant = variant or KernelVariant()
    w, u = _check_operands(H, W, U, transpose)
    if H.nnz == 0:
        return
    plan = _Plan(H, transpose)
    if variant.tag is KernelTag.BASELINE:
        _run_baseline(plan, w, u, workers)
    elif variant.tag is KernelTag.FUSED_ATOMIC:
        _run_fused(plan, w, u, workers)
    else:
        _run_fused(plan, w, u, workers, variant=variant)


def spmm_notrans(H, W, U, variant=None, workers=1):
    """Accumulate ``U += H @ W``.

    Args:
        H (CsbCooMatrix): Sparse operand.
        W (BlockVector): Input block, ``H.ncols`` rows.
        U (BlockVector): Accumulator, ``H.nrows`` rows, updated in place.
        variant (KernelVariant): Kernel strategy, Baseline by default.
        workers (int): Thread count.

    Raises:
        DimensionMismatch: Shapes do not conform or W aliases U.
    """
    _multiply(H, W, U, variant, False, workers)


def spmm_trans(H, W, U, variant=None, workers=1):
    """Accumulate ``U += H.T @ W`` without forming the transpose.

    Args:
        H (CsbCooMatrix): Sparse operand.
        W (BlockVector): Input block, ``H.nrows`` rows.
        U (BlockVector): Accumulator, ``H.ncols`` rows, updated in place.
        variant (KernelVariant): Kernel strategy, Baseline by default.
        workers (int): Thread count.

    Raises:
        DimensionMismatch: Shapes do not conform or W aliases U.
    """
    _multiply(H, W, U, variant, True, workers)


def apply_symmetric(L, D, W, variant=None, workers=1):
    """Return ``(L + L.T + diag(D)) @ W`` for a half-stored symmetric matrix.

    Args:
        L (CsbCooMatrix): Strictly lower triangle.
        D (array-like): Diagonal, one value per row.
        W (BlockVector): Input block.
        variant (KernelVariant): Kernel strategy.
        workers (int): Thread count.

    Returns:
        BlockVector: The product.

    Raises:
        NotStrictlyLower: L stores an entry on or above the diagonal.
        DimensionMismatch: Shapes do not conform.
    """
    D = np.asarray(D, dtype=np.float64).reshape(-1)
    w = as_array(W)
    if L.nrows != L.ncols or D.size != L.nrows or w.shape[0] != L.nrows:
        raise DimensionMismatch(
            f"Symmetric apply needs square L ({L.nrows}x{L.ncols}), "
            f"len(D)={D.size} and W with {w.shape[0]} rows to agree."
        )
    if not L.is_strictly_lower:
        raise NotStrictlyLower("Half-stored operand must be strictly lower triangular.")
    U = BlockVector.zeros(w.shape[0], w.shape[1])
    spmm_notrans(L, w, U, variant, workers)
    spmm_trans(L, w, U, variant, workers)
    U.data += D[:, None] * w
    return U
