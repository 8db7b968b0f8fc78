"""In-process stand-in for the row and column communicators.

A collective is one call that receives the contribution of every member
rank at once and returns what each rank would hold afterwards. Calling it
with a different set of ranks than the group's members raises
ProtocolDeadlock. Sums are always taken in ascending rank order.
"""

# Standard library
import logging
from collections import Counter
from dataclasses import dataclass, field

# Third-party imports
import numpy as np

# Local imports
from spmm_app.exceptions import DimensionMismatch

from .exceptions import ProtocolDeadlock

logger = logging.getLogger(__name__)


@dataclass
class CommStats:
    """Message counts and volume (float64 words) moved by collectives.

    ``local_spmm`` counts the per-rank kernel calls by direction.
    """

    collectives: Counter = field(default_factory=Counter)
    local_spmm: Counter = field(default_factory=Counter)
    messages: int = 0
    words: int = 0

    def record(self, kind, messages, words):
        self.collectives[kind] += 1
        self.messages += int(messages)
        self.words += int(words)

    def to_dict(self):
        return {
            'collectives': dict(sorted(self.collectives.items())),
            'local_spmm': dict(sorted(self.local_spmm.items())),
            'messages': self.messages,
            'words': self.words,
            'bytes': 8 * self.words,
        }


def _ordered_sum(parts, ranks):
    total = None
    for rank in sorted(ranks):
        value = np.asarray(parts[rank], dtype=np.float64)
        total = value.copy() if total is None else total + value
    return total


class Group:
    """One communicator: a named, ordered set of ranks.

    Attributes:
        name (str): Label such as ``'row 2'``.
        members (tuple[int]): Ranks in communicator order.
    """

    def __init__(self, name, members, stats):
        self.name = name
        self.members = tuple(members)
        self.stats = stats

    @property
    def size(self):
        return len(self.members)

    def _check(self, parts, kind):
        given = set(parts)
        if given != set(self.members):
            missing = sorted(set(self.members) - given)
            extra = sorted(given - set(self.members))
            raise ProtocolDeadlock(
                f"{kind} on {self.name}: missing ranks {missing}, unexpected ranks {extra}."
            )

    def _check_root(self, root, kind):
        if root not in self.members:
            raise ProtocolDeadlock(f"{kind} on {self.name}: root {root} is not a member.")

    def allgatherv(self, parts):
        """Concatenate every member's rows, in member order, on every member."""
        self._check(parts, 'allgatherv')
        gathered = np.concatenate([np.asarray(parts[r]) for r in self.members], axis=0)
        words = sum(np.asarray(parts[r]).size for r in self.members)
        self.stats.record('allgatherv', self.size * (self.size - 1), words * (self.size - 1))
        return {rank: gathered.copy() for rank in self.members}

    def bcast(self, root, value):
        """Copy ``value`` from ``root`` to every member."""
        self._check_root(root, 'bcast')
        value = np.asarray(value)
        self.stats.record('bcast', self.size - 1, value.size * (self.size - 1))
        return {rank: value.copy() for rank in self.members}

    def reduce(self, root, parts):
        """Sum of all contributions, delivered to ``root`` only."""
        self._check(parts, 'reduce')
        self._check_root(root, 'reduce')
        total = _ordered_sum(parts, self.members)
        self.stats.record('reduce', self.size - 1, total.size * (self.size - 1))
        return total

    def allreduce(self, parts):
        """Sum of all contributions on every member."""
        self._check(parts, 'allreduce')
        total = _ordered_sum(parts, self.members)
        self.stats.record('allreduce', 2 * (self.size - 1), 2 * total.size * (self.size - 1))
        return {rank: total.copy() for rank in self.members}

    def reduce_scatter(self, parts, counts):
        """Sum all contributions and hand member ``s`` its ``counts[s]`` rows.

        Args:
            parts (dict): Rank to equally shaped arrays.
            counts (list[int]): Rows per member, in member order.

        Returns:
            dict: Rank to its slice of the sum.
        """
        self._check(parts, 'reduce_scatter')
        total = _ordered_sum(parts, self.members)
        if len(counts) != self.size or sum(counts) != total.shape[0]:
            raise DimensionMismatch(
                f"reduce_scatter of {total.shape[0]} rows into counts {list(counts)}."
            )
        self.stats.record('reduce_scatter', self.size * (self.size - 1), total.size * (self.size - 1))
        cuts = np.concatenate([[0], np.cumsum(counts)])
        return {
            rank: total[cuts[s]:cuts[s + 1]].copy() for s, rank in enumerate(self.members)
        }


class SimComm:
    """Row and column communicators of a TriangularLayout.

    Attributes:
        layout (TriangularLayout): Rank map the groups come from.
        stats (CommStats): Accumulated message counters.
    """

    def __init__(self, layout):
        self.layout = layout
        self.stats = CommStats()
        self.rows = [Group(f"row {r}", members, self.stats)
                     for r, members in enumerate(layout.row_groups)]
        self.cols = [Group(f"column {c}", members, self.stats)
                     for c, members in enumerate(layout.col_groups)]
        self.world = Group('world', range(layout.n_ranks), self.stats)

    def row(self, r):
        return self.rows[r]

    def col(self, c):
        return self.cols[c]
