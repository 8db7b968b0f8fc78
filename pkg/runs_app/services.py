"""Solve, benchmark and layout runs shared by the commands and the API.

Every entry point takes the ``validated_data`` of the matching request
serializer and returns a report dict that has passed its report
serializer.
"""

# Standard library
import logging
import time
from pathlib import Path

# Third-party imports
import numpy as np

# Local imports
from core.conf import blockeig_setting, resolve_threads
from dist_app.layout import build_layout
from dist_app.operator import distributed_operator
from dist_app.partition import nnz_balance, partition_matrix
from lobpcg_app.config import SolverConfig
from lobpcg_app.exceptions import MaxIterReached
from lobpcg_app.operators import CsbSymmetricOperator
from lobpcg_app.solver import lobpcg_solve
from precond_app.fom import FomConfig
from precond_app.tiles import extract_tiles, random_tile_offsets, tile_statistics
from spmm_app.blockvector import BlockVector
from spmm_app.cache import load_csb, save_csb
from spmm_app.exceptions import DimensionMismatch
from spmm_app.kernels import KernelTag, KernelVariant, apply_symmetric

from .api.serializers import BenchReportSerializer, LayoutReportSerializer, RunReportSerializer
from .exceptions import BadParams, InvalidReport
from .matrix_market import ingest_matrix_market
from .synthetic import generate_synthetic

logger = logging.getLogger(__name__)

# Largest relative Frobenius distance from Baseline a timed kernel may show.
GATE_TOL = 1e-10


def validate_report(serializer_class, report):
    """Check ``report`` against its schema and return it unchanged.

    Raises:
        InvalidReport: The report does not validate.
    """
    serializer = serializer_class(data=report)
    if not serializer.is_valid():
        raise InvalidReport(f"Report failed validation: {serializer.errors}")
    return report


def load_problem(params):
    """Read or generate the matrix named by the request.

    Args:
        params (dict): Validated request data.

    Returns:
        Problem: The matrix.
    """
    if 'matrix' in params:
        return ingest_matrix_market(params['matrix'])
    return generate_synthetic(
        params['gen'],
        params['n'],
        density=params['density'],
        bandwidth=params['bandwidth'],
        max_tile=params['max_tile'],
        block_size=params['block_size'],
        seed=params['seed'],
        dominance=params['dominance'],
    )


def lower_matrix(problem, block_size, cache=None):
    """CSB form of the lower triangle, through the binary cache when given.

    A missing cache file is written; an existing one is read and must match
    the problem.
    """
    if cache and Path(cache).exists():
        L = load_csb(cache)
        if L.nrows != problem.n or L.nnz != problem.vals.size:
            raise DimensionMismatch(
                f"Cache {cache} holds a {L.nrows}x{L.ncols} matrix with {L.nnz} entries, "
                f"expected n={problem.n} with {problem.vals.size}."
            )
        logger.info("Loaded %r from %s", L, cache)
        return L
    L = problem.csb(block_size)
    if cache:
        save_csb(L, cache)
    return L


def _variant(params):
    tag = KernelTag(params['variant'])
    if tag is KernelTag.CACHE_BLOCKED:
        return KernelVariant.cache_blocked(params['cache_size'], params['vector_width'])
    return KernelVariant(tag)


def _config_echo(params):
    return {key: value for key, value in sorted(params.items())}


def _solve_report(params, problem, op, result, tiles):
    timings = params['timings']
    report = {
        'schema_version': blockeig_setting('REPORT_SCHEMA_VERSION'),
        'command': 'solve',
        'source': problem.source,
        'n': problem.n,
        'nnz': problem.nnz,
        'config': _config_echo(params),
        'operator': op.describe(),
        'eigenvalues': [float(v) for v in result.eigenvalues],
        'residual_norms': [float(v) for v in result.residual_norms],
        'converged': bool(result.converged),
        'n_converged': int(result.n_converged),
        'iterations': result.iterations,
        'operator_calls': int(result.operator_calls),
        'precond_fallbacks': int(result.precond_fallbacks),
        'basis_repairs': int(result.basis_repairs),
        'history': result.history.to_list(timings=timings),
        'tiles': tile_statistics(tiles) if tiles is not None else None,
        'distributed': op.report() if hasattr(op, 'report') else None,
    }
    if timings:
        report['timings'] = result.history.phase_totals()
    return validate_report(RunReportSerializer, report)


def run_solve(params):
    """Solve for the lowest eigenpairs and build the report.

    Args:
        params (dict): ``SolveRequestSerializer.validated_data``.

    Returns:
        dict: The validated RunReport.

    Raises:
        BlockEigError: Any input or numerical failure. A strict run that
            hits the iteration limit raises MaxIterReached with the report
            attached as ``exc.report``.
    """
    problem = load_problem(params)
    workers = resolve_threads(params.get('threads'))
    variant = _variant(params)
    block_size = params['block_size']
    L = lower_matrix(problem, block_size, params.get('cache'))

    tiles = None
    if params['precond']:
        offsets = problem.tile_offsets
        if offsets is None:
            offsets = random_tile_offsets(L.row_offsets, 1, params['max_tile'], seed=params['seed'])
        tiles = extract_tiles(L, problem.D, offsets)

    if params.get('nd'):
        layout = build_layout(params['nd'], n=problem.n)
        op = distributed_operator(
            layout, problem.rows, problem.cols, problem.vals, problem.D,
            variant=variant, block_size=block_size, workers=workers,
        )
    else:
        op = CsbSymmetricOperator(L, problem.D, variant, workers)

    cfg = SolverConfig(
        k=params['k'],
        nb=params.get('nb'),
        tol=params['tol'],
        maxiter=params['maxiter'],
        fom=FomConfig(iterations=params['fom_iters']),
        variant=variant,
        seed=params['seed'],
        workers=workers,
    )
    try:
        result = lobpcg_solve(op, cfg, tiles=tiles, strict=params['strict'])
    except MaxIterReached as exc:
        exc.report = _solve_report(params, problem, op, exc.result, tiles)
        raise
    logger.info(
        "Solve finished after %d iterations, %d of %d converged",
        result.iterations, result.n_converged, cfg.k,
    )
    return _solve_report(params, problem, op, result, tiles)


def _time_kernel(L, D, W, variant, workers, repeat):
    best, U = None, None
    for _ in range(repeat):
        start = time.perf_counter()
        U = apply_symmetric(L, D, W, variant, workers)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return U.data, best


def bench_variants(variants, grid):
    """Expand the variant list and the sweep grid into KernelVariants.

    Cache size and vector width only vary for CacheBlocked.
    """
    expanded = []
    for name in variants:
        tag = KernelTag(name)
        if tag is KernelTag.CACHE_BLOCKED:
            expanded.extend(
                KernelVariant.cache_blocked(cache, vector)
                for cache in grid['cache']
                for vector in grid['vector']
            )
        else:
            expanded.append(KernelVariant(tag))
    return expanded


def run_bench(params):
    """Time the SpMM variants over the sweep grid against Baseline.

    Every timed output is compared with the Baseline product; a kernel
    whose output differs by more than GATE_TOL gets no timing.

    Args:
        params (dict): ``BenchRequestSerializer.validated_data``.

    Returns:
        dict: The validated bench report.
    """
    problem = load_problem(params)
    workers = resolve_threads(params.get('threads'))
    repeat = params['repeat']
    L = lower_matrix(problem, params['block_size'], params.get('cache'))
    W = BlockVector.random(problem.n, params['nb'], seed=params['seed'])

    reference, _ = _time_kernel(L, problem.D, W, KernelVariant.baseline(), workers, 1)
    scale = np.linalg.norm(reference) or 1.0
    grid = []
    for variant in bench_variants(params['variants'], params['sweep']):
        U, seconds = _time_kernel(L, problem.D, W, variant, workers, repeat)
        rel_error = float(np.linalg.norm(U - reference) / scale)
        passed = rel_error <= GATE_TOL
        if not passed:
            logger.warning("%s differs from Baseline by %.3e", variant.label(), rel_error)
        cache_blocked = variant.tag is KernelTag.CACHE_BLOCKED
        grid.append({
            'variant': variant.tag.value,
            'label': variant.label(),
            'cache_size': variant.cache_size if cache_blocked else None,
            'vector_width': variant.vector_width if cache_blocked else None,
            'seconds': seconds if passed else None,
            'rel_error': rel_error,
            'passed': passed,
        })
    report = {
        'schema_version': blockeig_setting('REPORT_SCHEMA_VERSION'),
        'command': 'bench',
        'source': problem.source,
        'n': problem.n,
        'nnz': problem.nnz,
        'nb': params['nb'],
        'threads': workers,
        'repeat': repeat,
        'gate_tolerance': GATE_TOL,
        'grid': grid,
        'gates_passed': all(row['passed'] for row in grid),
    }
    return validate_report(BenchReportSerializer, report)


def explain_layout(params):
    """Describe the triangular layout, with load balance for a given matrix.

    Args:
        params (dict): ``ExplainLayoutSerializer.validated_data``.

    Returns:
        dict: The validated layout report.
    """
    balance = None
    if 'matrix' in params or 'gen' in params:
        problem = load_problem(params)
        if params.get('n') not in (None, problem.n):
            raise BadParams(f"n={params['n']} does not match the matrix dimension {problem.n}.")
        layout = build_layout(params['nd'], n=problem.n)
        parts = partition_matrix(
            problem.rows, problem.cols, problem.vals, problem.D, layout, params['block_size']
        )
        balance = nnz_balance(parts)
    else:
        layout = build_layout(params['nd'], n=params.get('n'))
    report = {
        'schema_version': blockeig_setting('REPORT_SCHEMA_VERSION'),
        'command': 'explain_layout',
        **layout.to_dict(),
        'balance': balance,
    }
    return validate_report(LayoutReportSerializer, report)
