"""Small dense kernels for Rayleigh-Ritz and Cholesky QR.

Projected problems are at most ``3 * nb`` wide, so everything here is a thin
layer over LAPACK through scipy with the failure modes the solver needs to
react to made explicit.
"""

# Standard library
import logging

# Third-party imports
import numpy as np
from scipy.linalg import eigh, solve_triangular
from scipy.linalg.lapack import dpotrf

# Local imports
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch

from .exceptions import NotPositiveDefinite, RankDeficient, SingularTriangular

logger = logging.getLogger(__name__)

# Column-major float64 ndarray; the projected matrices G, O, C, R, B.
SmallDense = np.ndarray

SINGULAR_TOL = 1e-14
# Smallest admissible diag(R) ratio after column equilibration.
RANK_TOL = 1e-7
# Largest admissible |Q.T Q - I| entry after both passes.
ORTH_TOL = 1e-10


def gram(A, B):
    """Return ``A.T @ B`` for two blocks with the same row count.

    When ``A`` and ``B`` are the same object the result is symmetrized.

    Args:
        A (BlockVector or np.ndarray): Left block.
        B (BlockVector or np.ndarray): Right block.

    Returns:
        SmallDense: ``nvecA x nvecB`` Gram matrix.

    Raises:
        DimensionMismatch: Row counts differ.
    """
    a, b = as_array(A), as_array(B)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"Gram of {a.shape} and {b.shape} blocks.")
    G = a.T @ b
    if A is B:
        G = 0.5 * (G + G.T)
    return np.asfortranarray(G)


def cholesky(B):
    """Upper Cholesky factor ``R`` with ``B = R.T @ R``.

    Args:
        B (SmallDense): Symmetric positive definite matrix.

    Returns:
        SmallDense: Upper triangular ``R``.

    Raises:
        NotPositiveDefinite: At the first non-positive pivot.
    """
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"Cholesky needs a square matrix, got {B.shape}.")
    if not np.all(np.isfinite(B)):
        raise NotPositiveDefinite(0, "Matrix has non-finite entries.")
    R, info = dpotrf(B, lower=0, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:
        raise ValueError(f"dpotrf rejected argument {-info}.")
    return np.asfortranarray(R)


def trsm_right_inv(W, R):
    """Overwrite ``W`` with ``W @ inv(R)`` for upper triangular ``R``.

    Args:
        W (BlockVector or np.ndarray): Block updated in place.
        R (SmallDense): Upper triangular factor.

    Raises:
        SingularTriangular: ``min |diag R|`` is negligible.
        DimensionMismatch: ``R`` does not match the block width.
    """
    w = as_array(W)
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (w.shape[1], w.shape[1]):
        raise DimensionMismatch(f"Triangular factor {R.shape} for block {w.shape}.")
    diag = np.abs(np.diag(R))
    if diag.size and (diag.max() == 0.0 or diag.min() <= SINGULAR_TOL * diag.max()):
        raise SingularTriangular("Triangular factor is numerically singular.")
    w[...] = solve_triangular(R, w.T, trans='T', lower=False).T


def _normalize_signs(C):
    """Flip columns so their largest-magnitude entry is positive."""
    if C.size == 0:
        return C
    pivots = np.argmax(np.abs(C), axis=0)
    signs = np.sign(C[pivots, np.arange(C.shape[1])])
    signs[signs == 0] = 1.0
    return C * signs


def sygv_lowest(Ahat, Bhat, k):
    """Lowest ``k`` eigenpairs of the pencil ``(Ahat, Bhat)``.

    Reduces to a standard problem through ``Bhat = R.T @ R`` and
    back-transforms the eigenvectors.

    Args:
        Ahat (SmallDense): Symmetric matrix.
        Bhat (SmallDense): Symmetric positive definite matrix.
        k (int): Number of eigenpairs.

    Returns:
        tuple[SmallDense, np.ndarray]: ``C`` with ``Bhat``-orthonormal
        columns and the ``k`` ascending eigenvalues ``D``.

    Raises:
        NotPositiveDefinite: ``Bhat`` failed Cholesky.
    """
    Ahat = np.asarray(Ahat, dtype=np.float64)
    n = Ahat.shape[0]
    if Ahat.shape != (n, n) or np.shape(Bhat) != (n, n):
        raise DimensionMismatch(f"Pencil shapes {Ahat.shape} and {np.shape(Bhat)}.")
    if not 1 <= k <= n:
        raise DimensionMismatch(f"Cannot take {k} eigenpairs of a {n}x{n} pencil.")
    R = cholesky(Bhat)
    half = solve_triangular(R, Ahat, trans='T', lower=False)
    M = solve_triangular(R, half.T, trans='T', lower=False).T
    M = 0.5 * (M + M.T)
    D, Y = eigh(M, subset_by_index=[0, k - 1])
    C = solve_triangular(R, Y, lower=False)
    return np.asfortranarray(_normalize_signs(C)), D


def _cholqr_pass(q, gram_fn):
    """One Cholesky QR step on ``q`` in place, shifted retry on failure."""
    B = gram_fn(q, q)
    try:
        R = cholesky(B)
        _check_rank(R)
    except (NotPositiveDefinite, RankDeficient):
        m, n = q.shape
        shift = 11.0 * (m * n + n * (n + 1)) * np.finfo(float).eps * np.linalg.norm(B, 2)
        logger.debug("Cholesky QR pass failed, retrying with shift %.3e", shift)
        try:
            R = cholesky(B + shift * np.eye(n))
            _check_rank(R)
        except NotPositiveDefinite as exc:
            raise RankDeficient("Gram matrix failed Cholesky twice.") from exc
    trsm_right_inv(q, R)
    return R


def _check_rank(R):
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() < RANK_TOL * diag.max():
        raise RankDeficient(
            f"Cholesky QR factor has diagonal ratio {diag.min() / diag.max():.2e}."
        )


def qr_of_transpose(X, gram_fn=gram):
    """Orthonormalize the columns of ``X`` by two-pass Cholesky QR.

    Stands in for an LQ factorization of ``X.T``: ``X = Q @ Rfac`` with
    ``Q.T @ Q = I`` and ``Rfac`` upper triangular.

    Args:
        X (BlockVector or np.ndarray): Block with ``nvec <= nrows``.
        gram_fn: ``(A, B) -> A.T @ B``; a distributed operator passes its
            allreduced Gram here.

    Returns:
        tuple[BlockVector, SmallDense]: ``(Q, Rfac)``.

    Raises:
        RankDeficient: The Gram Cholesky failed twice in a pass, a column
            is zero, or the result is not orthonormal to ``ORTH_TOL``.
    """
    q = as_array(X).copy()
    nrows, nvec = q.shape
    if nvec > nrows:
        raise DimensionMismatch(f"Cannot orthonormalize {nvec} columns of length {nrows}.")
    norms = np.linalg.norm(q, axis=0)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise RankDeficient("Block has a zero or non-finite column.")
    q /= norms
    Rfac = np.diag(norms)
    for _ in range(2):
        Rfac = _cholqr_pass(q, gram_fn) @ Rfac
    # A shifted pass on dependent columns returns a non-orthonormal q.
    error = np.abs(gram_fn(q, q) - np.eye(nvec)).max()
    if not error <= ORTH_TOL:
        raise RankDeficient(f"Columns are linearly dependent, |Q.T Q - I| = {error:.2e}.")
    return BlockVector(q), np.asfortranarray(Rfac)
