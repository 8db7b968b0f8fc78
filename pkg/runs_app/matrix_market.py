"""Matrix Market input and output for half-stored symmetric problems."""

# Standard library
import logging

# Third-party imports
import numpy as np
from scipy import sparse
from scipy.io import mminfo, mmread, mmwrite

# Local imports
from .exceptions import NotSymmetricHeader, ParseError
from .problem import Problem

logger = logging.getLogger(__name__)


def ingest_matrix_market(path):
    """Read a real symmetric coordinate Matrix Market file.

    Entries given in the upper triangle are mirrored into the lower one.

    Args:
        path (str or Path): Source file.

    Returns:
        Problem: Strictly lower entries sorted by ``(row, col)`` and the
        diagonal.

    Raises:
        ParseError: The file is unreadable, dense, complex or not square.
        NotSymmetricHeader: The header does not say ``symmetric``.
    """
    try:
        nrows, ncols, _, fmt, kind, symmetry = mminfo(str(path))
    except (OSError, ValueError, IndexError, RuntimeError) as exc:
        raise ParseError(f"Cannot read Matrix Market header of {path}: {exc}") from exc
    if fmt != 'coordinate':
        raise ParseError(f"{path} is in {fmt} format, expected coordinate.")
    if kind not in ('real', 'integer'):
        raise ParseError(f"{path} holds {kind} values, expected real.")
    if symmetry != 'symmetric':
        raise NotSymmetricHeader(f"{path} is declared {symmetry}, expected symmetric.")
    if nrows != ncols:
        raise ParseError(f"{path} is {nrows}x{ncols}, expected a square matrix.")

    try:
        full = sparse.coo_matrix(mmread(str(path)))
    except (OSError, ValueError, IndexError, RuntimeError) as exc:
        raise ParseError(f"Cannot read entries of {path}: {exc}") from exc
    full = full.tocsr()
    full.eliminate_zeros()
    D = full.diagonal().astype(np.float64)
    lower = sparse.tril(full, k=-1, format='coo')
    order = np.lexsort((lower.col, lower.row))
    problem = Problem(
        rows=lower.row[order].astype(np.int64),
        cols=lower.col[order].astype(np.int64),
        vals=lower.data[order].astype(np.float64),
        D=D,
        source=str(path),
    )
    logger.info("Read %s: n=%d, %d lower entries", path, problem.n, problem.vals.size)
    return problem


def write_matrix_market(path, problem, comment=''):
    """Write the lower triangle and diagonal as a symmetric Matrix Market file.

    Args:
        path (str or Path): Destination file.
        problem (Problem): Matrix to store.
        comment (str): Header comment.
    """
    diag = np.flatnonzero(problem.D)
    rows = np.concatenate([problem.rows, diag])
    cols = np.concatenate([problem.cols, diag])
    vals = np.concatenate([problem.vals, problem.D[diag]])
    matrix = sparse.coo_matrix((vals, (rows, cols)), shape=(problem.n, problem.n))
    mmwrite(str(path), matrix, comment=comment, field='real', precision=17, symmetry='symmetric')
    logger.debug("Wrote n=%d matrix to %s", problem.n, path)
