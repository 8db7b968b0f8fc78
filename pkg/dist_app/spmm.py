"""Distributed ``U = H @ W`` over the triangular layout.

The protocol per call:

1. allgatherv of the segments of ``W_c`` over column group ``c``;
2. the diagonal rank of row ``r`` broadcasts ``W_r`` over row group ``r``
   while every rank computes ``M @ W_c`` on its grid block ``M``;
3. those row products are reduced onto the diagonal rank of each row while
   every rank computes ``M.T @ W_r``;
4. diagonal ranks add the reduced row result to their column product;
5. column products are reduce-scattered over each column group back into
   the segments.
"""

# Standard library
import logging

# Third-party imports
import numpy as np

# Local imports
from core.parallel import run_tasks
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch
from spmm_app.kernels import spmm_notrans, spmm_trans

from .comm import SimComm

logger = logging.getLogger(__name__)


def _check_inputs(layout, parts, W_segments):
    if len(parts) != layout.n_ranks:
        raise DimensionMismatch(f"{len(parts)} rank matrices for {layout.n_ranks} ranks.")
    widths = set()
    for rank, piece in W_segments.items():
        if rank not in range(layout.n_ranks):
            continue
        _, start, stop = layout.segment_of(rank)
        piece = as_array(piece)
        if piece.ndim != 2 or piece.shape[0] != stop - start:
            raise DimensionMismatch(
                f"Rank {rank} holds a {piece.shape} segment, expected {stop - start} rows."
            )
        widths.add(piece.shape[1])
    if len(widths) > 1:
        raise DimensionMismatch(f"Segments disagree on the block width: {sorted(widths)}.")


def distributed_spmm(layout, parts, W_segments, variant=None, comm=None, workers=1):
    """Multiply the distributed symmetric matrix by a distributed block.

    Args:
        layout (TriangularLayout): Rank map.
        parts (list[RankMatrix]): Matrix data, indexed by rank.
        W_segments (dict): Rank to its segment of ``W``.
        variant (KernelVariant): Local kernel strategy.
        comm (SimComm or None): Communicators; a fresh one when omitted.
        workers (int): Ranks computed concurrently.

    Returns:
        dict: Rank to its segment of ``U``.

    Raises:
        DimensionMismatch: Segments do not conform to the layout.
        ProtocolDeadlock: A rank is missing from a collective.
    """
    comm = comm or SimComm(layout)
    _check_inputs(layout, parts, W_segments)

    # 1. column groups assemble their sub-vector
    W_col = {}
    for group in comm.cols:
        W_col.update(group.allgatherv(
            {rank: as_array(W_segments[rank]) for rank in group.members if rank in W_segments}
        ))

    # 2. row groups receive their sub-vector from the diagonal rank
    W_row = {}
    for r, group in enumerate(comm.rows):
        root = layout.diagonal_ranks[r]
        W_row.update(group.bcast(root, W_col[root]))

    def notrans(rank):
        part = parts[rank]
        w = W_col[rank]
        u = BlockVector.zeros(part.matrix.nrows, w.shape[1])
        spmm_notrans(part.matrix, w, u, variant)
        if part.diagonal is not None:
            u.data += part.diagonal[:, None] * w
        return u.data

    U_row = dict(zip(range(layout.n_ranks), run_tasks(notrans, range(layout.n_ranks), workers)))
    comm.stats.local_spmm['notrans'] += layout.n_ranks

    # 3. row results meet on the diagonal rank
    row_sums = {}
    for r, group in enumerate(comm.rows):
        root = layout.diagonal_ranks[r]
        row_sums[root] = group.reduce(root, {rank: U_row[rank] for rank in group.members})

    def trans(rank):
        part = parts[rank]
        w = W_row[rank]
        u = BlockVector.zeros(part.matrix.ncols, w.shape[1])
        spmm_trans(part.matrix, w, u, variant)
        return u.data

    U_col = dict(zip(range(layout.n_ranks), run_tasks(trans, range(layout.n_ranks), workers)))
    comm.stats.local_spmm['trans'] += layout.n_ranks

    # 4. diagonal ranks merge both halves
    for root, total in row_sums.items():
        U_col[root] = U_col[root] + total

    # 5. back to segments
    U_segments = {}
    for c, group in enumerate(comm.cols):
        counts = [stop - start for _, start, stop in layout.vector_segments[c]]
        U_segments.update(group.reduce_scatter(
            {rank: U_col[rank] for rank in group.members}, counts
        ))
    logger.debug(
        "Distributed SpMM over %d ranks, %d stored nonzeros",
        layout.n_ranks, int(np.sum([part.nnz for part in parts])),
    )
    return U_segments
