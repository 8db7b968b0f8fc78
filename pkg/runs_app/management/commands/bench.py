"""``manage.py bench``: time the SpMM variants over a parameter sweep."""

# Third-party imports
from django.core.management.base import CommandError

# Local imports
from runs_app.api.serializers import VARIANT_CHOICES, BenchRequestSerializer
from runs_app.management.report import ReportCommand
from runs_app.services import run_bench

from .solve import add_source_arguments

GATE_FAILURE = 4


class Command(ReportCommand):
    help = "Benchmark the SpMM kernels against Baseline and print the timing grid."

    serializer_class = BenchRequestSerializer

    def add_arguments(self, parser):
        add_source_arguments(parser)
        parser.add_argument('--nb', type=int, help="Vectors per block.")
        parser.add_argument('--variant', dest='variants', action='append',
                            choices=VARIANT_CHOICES, help="Repeat to time several variants.")
        parser.add_argument('--sweep', action='append',
                            help="Axis values such as cache=64,256,1024 or vector=128,256.")
        parser.add_argument('--repeat', type=int, help="Timed runs per kernel, best is kept.")
        parser.add_argument('--threads', type=int)
        parser.add_argument('--cache', help="Binary CSB cache file, written when missing.")
        self.add_output_arguments(parser)

    def run(self, params):
        report = run_bench(params)
        if not report['gates_passed']:
            self.emit(report)
            failed = [row['label'] for row in report['grid'] if not row['passed']]
            raise CommandError(
                f"Kernels disagree with Baseline: {', '.join(failed)}", returncode=GATE_FAILURE
            )
        return report
