"""The LOBPCG driver.

One iteration preconditions the residual, cleans up the search basis,
applies the operator to the new directions only, and updates ``X``, ``P``
and their images through the Rayleigh-Ritz coefficients.
"""

# Standard library
import logging
import time

# Third-party imports
import numpy as np

# Local imports
from densela_app.dense import qr_of_transpose, trsm_right_inv
from densela_app.exceptions import RankDeficient
from precond_app.fom import FomStats, apply_preconditioner
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch

from .exceptions import BasisDegenerate, BreakdownUnrecoverable, MaxIterReached
from .history import ConvergenceHistory, IterationRecord, LobpcgResult, SolverState
from .operators import as_operator
from .rayleigh_ritz import (
    convergence_check,
    rayleigh_ritz,
    residual_block,
    residual_norms,
    update_blocks,
)

logger = logging.getLogger(__name__)

# Columns keeping less than this share of their norm after projection
# are treated as lying in the span they were projected against.
SPAN_TOL = 1e-10
DIRECTION_TOL = 1e-8


def _project_out(W, bases, gram_fn):
    """One block Gram-Schmidt pass of ``W`` against orthonormal bases."""
    w = as_array(W)
    for Q in bases:
        if Q is not None:
            w -= as_array(Q) @ gram_fn(Q, w)


def _orthonormalize_directions(state, gram_fn):
    """Orthogonalize ``P`` against ``X`` and normalize it, ``HP`` alike.

    Returns:
        bool: False when ``P`` had to be dropped.
    """
    if state.P is None:
        return True
    P, HP = as_array(state.P).copy(), as_array(state.HP).copy()
    before = np.linalg.norm(P, axis=0)
    coef = gram_fn(state.X, P)
    P -= as_array(state.X) @ coef
    HP -= as_array(state.HX) @ coef
    after = np.linalg.norm(P, axis=0)
    if np.any(after <= DIRECTION_TOL * before):
        state.P = state.HP = None
        return False
    try:
        Q, Rfac = qr_of_transpose(P, gram_fn)
    except RankDeficient:
        state.P = state.HP = None
        return False
    trsm_right_inv(HP, Rfac)
    state.P, state.HP = Q, BlockVector(HP)
    return True


def _orthonormalize_residuals(W, state, rng, gram_fn):
    """Project ``W`` off ``[X, P]`` and orthonormalize it.

    Columns that vanish under the projection are replaced by random
    directions; a failed QR replaces the whole block once.

    Returns:
        tuple[BlockVector, int]: The orthonormal block and the number of
        repairs made.

    Raises:
        BreakdownUnrecoverable: QR failed on the replacement block too.
    """
    w = as_array(W).copy()
    bases = (state.X, state.P)
    before = np.linalg.norm(w, axis=0)
    _project_out(w, bases, gram_fn)
    after = np.linalg.norm(w, axis=0)
    lost = (after <= SPAN_TOL * before) | (before == 0.0)
    repairs = 0
    if lost.any():
        logger.debug("Replacing %d residual directions inside span(X, P)", int(lost.sum()))
        w[:, lost] = rng.uniform(-1.0, 1.0, size=(w.shape[0], int(lost.sum())))
        _project_out(w, bases, gram_fn)
        repairs += 1
    try:
        Q, _ = qr_of_transpose(w, gram_fn)
    except RankDeficient:
        logger.warning("Residual block is rank deficient, restarting it randomly")
        w = rng.uniform(-1.0, 1.0, size=w.shape)
        _project_out(w, bases, gram_fn)
        repairs += 1
        try:
            Q, _ = qr_of_transpose(w, gram_fn)
        except RankDeficient as exc:
            raise BreakdownUnrecoverable("Residual block could not be repaired.") from exc
    return Q, repairs


def _initial_block(X0, n, nb, rng):
    if X0 is None:
        return rng.uniform(-1.0, 1.0, size=(n, nb))
    x0 = as_array(X0)
    if x0.shape != (n, nb):
        raise DimensionMismatch(f"Initial block {x0.shape}, expected {(n, nb)}.")
    return x0.copy()


def lobpcg_solve(operator, cfg, tiles=None, X0=None, n=None, on_iteration=None, strict=False):
    """Compute the ``cfg.k`` lowest eigenpairs of a symmetric operator.

    Args:
        operator: SymmetricOperator, or a callable ``W -> H @ W`` with ``n``.
        cfg (SolverConfig): Block width, tolerance, limits and seed.
        tiles (DiagonalTileSet or None): Preconditioner tiles; without them
            the raw residual is used.
        X0 (array-like or None): Initial block, random when omitted.
        n (int or None): Dimension of a callable operator.
        on_iteration: Optional ``callback(state, record)`` after every
            iteration.
        strict (bool): Raise MaxIterReached instead of returning an
            unconverged result.

    Returns:
        LobpcgResult: Eigenvalues, vectors and history.

    Raises:
        InvalidSolverConfig: ``3 * nb > n``.
        BreakdownUnrecoverable: The basis could not be repaired.
        MaxIterReached: Only with ``strict``.
    """
    op = as_operator(operator, n)
    n = op.n
    cfg.check_dimension(n)
    if tiles is not None and tiles.n != n:
        raise DimensionMismatch(f"Tiles cover {tiles.n} rows, operator has {n}.")
    nb, k = cfg.nb, cfg.k
    rng = np.random.default_rng(cfg.seed)
    calls_before = op.calls

    X, _ = qr_of_transpose(_initial_block(X0, n, nb, rng), op.gram)
    HX = op(X)
    (C1, _, _), theta = rayleigh_ritz((X,), (HX,), nb, gram=op.gram)
    state = SolverState(
        X=BlockVector(as_array(X) @ C1), HX=BlockVector(as_array(HX) @ C1), theta=theta
    )
    R = residual_block(state.HX, state.X, theta)
    state.residual_norms = residual_norms(R)

    history = ConvergenceHistory()
    fom_stats = FomStats()
    repairs = 0
    converged = False
    for iteration in range(1, cfg.maxiter + 1):
        t_start = time.perf_counter()
        if tiles is not None:
            W = apply_preconditioner(
                tiles, state.theta, R, cfg.fom, k=k, workers=cfg.workers, stats=fom_stats
            )
        else:
            W = R
        t_precond = time.perf_counter()

        if not _orthonormalize_directions(state, op.gram):
            logger.warning("Iteration %d: dropped search directions P", iteration)
            repairs += 1
        state.W, fixed = _orthonormalize_residuals(W, state, rng, op.gram)
        repairs += fixed

        t_spmm = time.perf_counter()
        state.HW = op(state.W)
        spmm_seconds = time.perf_counter() - t_spmm

        try:
            coefs, theta = rayleigh_ritz(
                (state.X, state.W, state.P), (state.HX, state.HW, state.HP), nb, gram=op.gram
            )
        except BasisDegenerate as exc:
            if state.P is None:
                raise BreakdownUnrecoverable(str(exc)) from exc
            logger.warning("Iteration %d: %s, retrying without P", iteration, exc)
            repairs += 1
            state.P = state.HP = None
            try:
                coefs, theta = rayleigh_ritz(
                    (state.X, state.W, None), (state.HX, state.HW, None), nb, gram=op.gram
                )
            except BasisDegenerate as again:
                raise BreakdownUnrecoverable(str(again)) from again

        state.X, state.HX, state.P, state.HP = update_blocks(
            (state.X, state.W, state.P), (state.HX, state.HW, state.HP), *coefs
        )
        state.theta = theta
        R = residual_block(state.HX, state.X, theta)
        state.residual_norms = residual_norms(R)
        _, state.n_converged = convergence_check(R, state.X, theta, cfg.tol, k)
        state.iteration = iteration

        t_end = time.perf_counter()
        precond_seconds = t_precond - t_start
        record = IterationRecord(
            iteration=iteration,
            theta=tuple(float(t) for t in theta),
            residual_norms=tuple(float(r) for r in state.residual_norms),
            n_converged=state.n_converged,
            timings={
                'spmm': spmm_seconds,
                'precond': precond_seconds,
                'dense': t_end - t_start - spmm_seconds - precond_seconds,
                'total': t_end - t_start,
            },
        )
        history.append(record)
        logger.debug(
            "Iteration %d: theta[:k]=%s converged=%d/%d",
            iteration, np.array2string(theta[:k], precision=10), state.n_converged, k,
        )
        if on_iteration is not None:
            on_iteration(state, record)
        if state.n_converged >= k:
            converged = True
            break

    result = LobpcgResult(
        eigenvalues=np.array(state.theta[:k]),
        X=BlockVector(as_array(state.X)[:, :k]),
        residual_norms=np.array(state.residual_norms[:k]),
        history=history,
        converged=converged,
        n_converged=state.n_converged,
        operator_calls=op.calls - calls_before,
        precond_fallbacks=fom_stats.fallbacks,
        basis_repairs=repairs,
    )
    if converged:
        logger.info("Converged %d eigenpairs in %d iterations", k, result.iterations)
    else:
        logger.warning(
            "Stopped after %d iterations with %d of %d pairs converged",
            result.iterations, state.n_converged, k,
        )
        if strict:
            raise MaxIterReached(result)
    return result
