"""``manage.py solve``: lowest eigenpairs of a sparse symmetric matrix."""

# Local imports
from runs_app.api.serializers import VARIANT_CHOICES, SolveRequestSerializer
from runs_app.management.report import ReportCommand
from runs_app.services import run_solve
from runs_app.synthetic import KINDS


def add_source_arguments(parser):
    """Flags selecting the matrix, shared by every command."""
    parser.add_argument('--matrix', help="Real symmetric Matrix Market file.")
    parser.add_argument('--gen', choices=KINDS, help="Generate a synthetic matrix instead.")
    parser.add_argument('--n', type=int, help="Dimension of the generated matrix.")
    parser.add_argument('--density', type=float)
    parser.add_argument('--bandwidth', type=int)
    parser.add_argument('--max-tile', dest='max_tile', type=int)
    parser.add_argument('--dominance', type=float)
    parser.add_argument('--block-size', dest='block_size', type=int)
    parser.add_argument('--seed', type=int)


class Command(ReportCommand):
    help = "Compute the k lowest eigenpairs with LOBPCG and print a JSON report."

    serializer_class = SolveRequestSerializer

    def add_arguments(self, parser):
        add_source_arguments(parser)
        parser.add_argument('--k', type=int, required=True)
        parser.add_argument('--nb', type=int)
        parser.add_argument('--tol', type=float)
        parser.add_argument('--maxiter', type=int)
        parser.add_argument('--fom-iters', dest='fom_iters', type=int)
        parser.add_argument('--no-precond', dest='precond', action='store_false', default=None)
        parser.add_argument('--variant', choices=VARIANT_CHOICES)
        parser.add_argument('--cache-size', dest='cache_size', type=int)
        parser.add_argument('--vector-width', dest='vector_width', type=int)
        parser.add_argument('--nd', type=int, help="Odd partition count for a distributed run.")
        parser.add_argument('--threads', type=int)
        parser.add_argument('--strict', action='store_true', default=None,
                            help="Exit with code 4 when maxiter is reached.")
        parser.add_argument('--no-timings', dest='timings', action='store_false', default=None,
                            help="Leave wall-clock data out of the report.")
        parser.add_argument('--cache', help="Binary CSB cache file, written when missing.")
        self.add_output_arguments(parser)

    def run(self, params):
        return run_solve(params)
