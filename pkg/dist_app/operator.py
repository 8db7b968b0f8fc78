"""Adapter that lets lobpcg_solve run on the distributed layer."""

# Standard library
import logging

# Third-party imports
import numpy as np

# Local imports
from lobpcg_app.operators import SymmetricOperator
from spmm_app.exceptions import DimensionMismatch
from spmm_app.matrix import DEFAULT_BLOCK_SIZE

from .comm import SimComm
from .partition import gather_solution, nnz_balance, partition_matrix, partition_vectors
from .spmm import distributed_spmm

logger = logging.getLogger(__name__)


def distributed_gram_allreduce(layout, partials, comm=None):
    """Sum per-rank partial Gram blocks onto every rank.

    Args:
        layout (TriangularLayout): Rank map.
        partials (dict): Rank to its partial ``A_seg.T @ B_seg``.
        comm (SimComm or None): Communicators.

    Returns:
        dict: Rank to the summed matrix, identical on every rank.

    Raises:
        DimensionMismatch: Partials differ in shape.
        ProtocolDeadlock: A rank did not contribute.
    """
    comm = comm or SimComm(layout)
    shapes = {np.shape(p) for p in partials.values()}
    if len(shapes) > 1:
        raise DimensionMismatch(f"Partial Gram blocks disagree in shape: {sorted(shapes)}.")
    return comm.world.allreduce(partials)


class DistributedOperator(SymmetricOperator):
    """Symmetric operator whose products go through the distributed protocol.

    Attributes:
        layout (TriangularLayout): Rank map.
        parts (list[RankMatrix]): Matrix data per rank.
        variant (KernelVariant): Local kernel strategy.
        workers (int): Ranks computed concurrently.
        comm (SimComm): Communicators, accumulating message statistics.
    """

    def __init__(self, layout, parts, variant=None, workers=1, comm=None):
        super().__init__(layout.n)
        self.layout = layout
        self.parts = parts
        self.variant = variant
        self.workers = workers
        self.comm = comm or SimComm(layout)

    def apply(self, W):
        segments = partition_vectors(W, self.layout)
        U = distributed_spmm(
            self.layout, self.parts, segments, self.variant, self.comm, self.workers
        )
        return gather_solution(U, self.layout).data

    def gram(self, A, B):
        a_seg = partition_vectors(A, self.layout)
        b_seg = a_seg if A is B else partition_vectors(B, self.layout)
        partials = {rank: a_seg[rank].T @ b_seg[rank] for rank in a_seg}
        G = distributed_gram_allreduce(self.layout, partials, self.comm)[0]
        if A is B:
            G = 0.5 * (G + G.T)
        return np.asfortranarray(G)

    def describe(self):
        label = self.variant.label() if self.variant else 'Baseline'
        return f"dist[n_d={self.layout.n_d}, {label}]"

    def report(self):
        """Layout, balance and communication figures for the run report."""
        return {
            'n_d': self.layout.n_d,
            'n_ranks': self.layout.n_ranks,
            'balance': nnz_balance(self.parts),
            'comm': self.comm.stats.to_dict(),
        }


def distributed_operator(layout, rows, cols, vals, D, variant=None,
                         block_size=DEFAULT_BLOCK_SIZE, workers=1):
    """Partition a half-stored matrix and wrap it as a solver operator.

    Args:
        layout (TriangularLayout): Rank map.
        rows, cols, vals (array-like): Strictly lower COO entries.
        D (array-like): Diagonal.
        variant (KernelVariant): Local kernel strategy.
        block_size (int): CSB block extent inside every rank.
        workers (int): Ranks computed concurrently.

    Returns:
        DistributedOperator: The operator.
    """
    parts = partition_matrix(rows, cols, vals, D, layout, block_size)
    op = DistributedOperator(layout, parts, variant, workers)
    logger.info(
        "Distributed operator over %d ranks, imbalance %.3f",
        layout.n_ranks, nnz_balance(parts)['imbalance'],
    )
    return op

