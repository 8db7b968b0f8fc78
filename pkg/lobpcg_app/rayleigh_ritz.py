"""Rayleigh-Ritz projection and the block updates around it."""

# Third-party imports
import numpy as np

# Local imports
from densela_app.dense import gram as dense_gram, sygv_lowest
from densela_app.exceptions import NotPositiveDefinite
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch

from .exceptions import BasisDegenerate


def _present(parts):
    return [part for part in parts if part is not None]


def projected_matrices(S_parts, HS_parts, gram=dense_gram):
    """Assemble ``G = S.T H S`` and ``O = S.T S`` from block Gram products.

    Only the lower triangle of block products is computed (``X'HX``,
    ``W'HX``, ``W'HW``, ``P'HX``, ``P'HW``, ``P'HP`` for three parts) and
    mirrored to the upper triangle.

    Args:
        S_parts (tuple): ``(X, W, P)``; missing parts are None.
        HS_parts (tuple): ``(HX, HW, HP)`` matching ``S_parts``.
        gram: Gram product ``(A, B) -> A.T @ B``.

    Returns:
        tuple[SmallDense, SmallDense, list[int]]: ``G``, ``O`` and the
        width of every present part.
    """
    S = _present(S_parts)
    HS = _present(HS_parts)
    if len(S) != len(HS):
        raise DimensionMismatch("Every basis part needs its operator image.")
    widths = [as_array(part).shape[1] for part in S]
    nrows = {as_array(part).shape[0] for part in S + HS}
    if len(nrows) != 1:
        raise DimensionMismatch(f"Basis parts have different row counts {sorted(nrows)}.")
    for part, image in zip(S, HS):
        if as_array(image).shape != as_array(part).shape:
            raise DimensionMismatch("Operator image shape differs from its part.")

    starts = np.concatenate([[0], np.cumsum(widths)])
    m = int(starts[-1])
    G = np.zeros((m, m), order='F')
    O = np.zeros((m, m), order='F')
    for a in range(len(S)):
        ra = slice(starts[a], starts[a + 1])
        for b in range(a + 1):
            rb = slice(starts[b], starts[b + 1])
            G_ab = gram(S[a], HS[b])
            O_ab = gram(S[a], S[b])
            if a == b:
                G_ab = 0.5 * (G_ab + G_ab.T)
                O_ab = 0.5 * (O_ab + O_ab.T)
            G[ra, rb] = G_ab
            O[ra, rb] = O_ab
            if a != b:
                G[rb, ra] = G_ab.T
                O[rb, ra] = O_ab.T
    return G, O, widths


def rayleigh_ritz(S_parts, HS_parts, k_keep, gram=dense_gram):
    """Lowest ``k_keep`` Ritz pairs of H on ``span(X, W, P)``.

    Args:
        S_parts (tuple): ``(X, W, P)``; ``W`` and ``P`` may be None.
        HS_parts (tuple): ``(HX, HW, HP)``.
        k_keep (int): Number of Ritz pairs to return.
        gram: Gram product, replaced by distributed operators.

    Returns:
        tuple[tuple, np.ndarray]: ``(C1, C2, C3)`` block rows of the
        coefficient matrix (None for absent parts) and ascending ``Theta``.

    Raises:
        BasisDegenerate: ``S.T S`` failed Cholesky.
    """
    G, O, widths = projected_matrices(S_parts, HS_parts, gram)
    try:
        C, theta = sygv_lowest(G, O, k_keep)
    except NotPositiveDefinite as exc:
        raise BasisDegenerate(
            f"Basis Gram matrix lost definiteness at column {exc.index}."
        ) from exc
    rows = np.concatenate([[0], np.cumsum(widths)])
    pieces = iter([C[rows[i]:rows[i + 1]] for i in range(len(widths))])
    blocks = tuple(next(pieces) if part is not None else None for part in S_parts)
    return blocks + (None,) * (3 - len(blocks)), theta


def update_blocks(S_parts, HS_parts, C1, C2, C3):
    """Form the next ``X`` and ``P`` and their images by recurrence.

    ``P+ = W C2 + P C3`` and ``X+ = X C1 + P+``; ``HX+`` and ``HP+`` use the
    same coefficients on ``HX``, ``HW``, ``HP``, so H is never applied.

    Args:
        S_parts (tuple): ``(X, W, P)``; ``P`` may be None.
        HS_parts (tuple): ``(HX, HW, HP)``.
        C1, C2, C3 (SmallDense or None): Coefficient block rows.

    Returns:
        tuple[BlockVector, BlockVector, BlockVector, BlockVector]:
        ``(X+, HX+, P+, HP+)``.

    Raises:
        DimensionMismatch: Coefficient rows do not match the parts.
    """
    X, W, P = (None if part is None else as_array(part) for part in S_parts)
    HX, HW, HP = (None if part is None else as_array(part) for part in HS_parts)
    terms = [(W, HW, C2)]
    if P is not None or C3 is not None:
        terms.append((P, HP, C3))
    for block, image, coef in [(X, HX, C1)] + terms:
        if block is None or image is None or coef is None:
            raise DimensionMismatch("Missing basis part or coefficient block.")
        if coef.shape[0] != block.shape[1] or coef.shape[1] != C1.shape[1]:
            raise DimensionMismatch(
                f"Coefficients {coef.shape} do not fit a {block.shape} block."
            )

    P_next = sum(block @ coef for block, _, coef in terms)
    HP_next = sum(image @ coef for _, image, coef in terms)
    return (
        BlockVector(X @ C1 + P_next),
        BlockVector(HX @ C1 + HP_next),
        BlockVector(P_next),
        BlockVector(HP_next),
    )


def residual_block(HX, X, theta):
    """Return ``R = HX - X diag(theta)``."""
    hx, x = as_array(HX), as_array(X)
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if hx.shape != x.shape or theta.size != x.shape[1]:
        raise DimensionMismatch(
            f"Residual of {hx.shape} image, {x.shape} block and {theta.size} values."
        )
    return BlockVector(hx - x * theta)


def residual_norms(R):
    return np.linalg.norm(as_array(R), axis=0)


def convergence_check(R, X, theta, tol, k=None):
    """Flag columns with ``||r_v|| <= tol * max(1, |theta_v|) * ||x_v||``.

    Args:
        R (BlockVector): Residual block.
        X (BlockVector): Ritz vectors.
        theta (array-like): Ritz values.
        tol (float): Relative tolerance.
        k (int or None): Only the first ``k`` columns are counted.

    Returns:
        tuple[np.ndarray, int]: Boolean flag per column and the number of
        converged columns among the first ``k``.
    """
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    bound = tol * np.maximum(1.0, np.abs(theta)) * np.linalg.norm(as_array(X), axis=0)
    flags = residual_norms(R) <= bound
    k = flags.size if k is None else k
    return flags, int(np.count_nonzero(flags[:k]))
