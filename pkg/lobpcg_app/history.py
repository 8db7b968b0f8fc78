"""Solver state, per-iteration history and the final result."""

# Standard library
from dataclasses import dataclass, field

# Third-party imports
import numpy as np

PHASES = ('spmm', 'precond', 'dense', 'total')


@dataclass
class SolverState:
    """Blocks carried between iterations.

    ``P`` and ``HP`` are None until the first update. ``HX``, ``HW`` and
    ``HP`` are kept by recurrence; only ``HW`` comes from the operator.
    """

    X: object
    HX: object
    W: object = None
    HW: object = None
    P: object = None
    HP: object = None
    theta: np.ndarray = None
    residual_norms: np.ndarray = None
    n_converged: int = 0
    iteration: int = 0


@dataclass(frozen=True)
class IterationRecord:
    """One completed iteration.

    Attributes:
        iteration (int): 1-based iteration number.
        theta (tuple[float]): All ``nb`` Ritz values, ascending.
        residual_norms (tuple[float]): ``||R[:, v]||`` per column.
        n_converged (int): Converged pairs among the first ``k``.
        timings (dict): Seconds spent in ``spmm``, ``precond``, ``dense``
            and ``total``.
    """

    iteration: int
    theta: tuple
    residual_norms: tuple
    n_converged: int
    timings: dict = field(default_factory=dict)

    def to_dict(self, timings=True):
        data = {
            'iteration': self.iteration,
            'theta': list(self.theta),
            'residual_norms': list(self.residual_norms),
            'n_converged': self.n_converged,
        }
        if timings:
            data['timings'] = dict(self.timings)
        return data


class ConvergenceHistory:
    """Ordered list of IterationRecord, one per completed iteration."""

    def __init__(self):
        self.records = []

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def traces(self, k):
        """Sum of the ``k`` smallest Ritz values per iteration."""
        return [float(np.sum(record.theta[:k])) for record in self.records]

    def phase_totals(self):
        """Seconds per phase summed over all iterations."""
        totals = dict.fromkeys(PHASES, 0.0)
        for record in self.records:
            for phase in PHASES:
                totals[phase] += record.timings.get(phase, 0.0)
        return totals

    def to_list(self, timings=True):
        return [record.to_dict(timings) for record in self.records]


@dataclass
class LobpcgResult:
    """Outcome of :func:`lobpcg_app.solver.lobpcg_solve`.

    Attributes:
        eigenvalues (np.ndarray): The ``k`` lowest Ritz values.
        X (BlockVector): Matching Ritz vectors.
        residual_norms (np.ndarray): Final ``||R[:, v]||`` for the ``k``
            columns.
        history (ConvergenceHistory): Per-iteration records.
        converged (bool): Whether all ``k`` pairs met the tolerance.
        n_converged (int): Converged pairs among the first ``k``.
        operator_calls (int): Operator applications, initial one included.
        precond_fallbacks (int): Preconditioner columns returned raw.
        basis_repairs (int): Times P was dropped or W replaced.
    """

    eigenvalues: np.ndarray
    X: object
    residual_norms: np.ndarray
    history: ConvergenceHistory
    converged: bool
    n_converged: int
    operator_calls: int
    precond_fallbacks: int = 0
    basis_repairs: int = 0

    @property
    def iterations(self):
        return len(self.history)
