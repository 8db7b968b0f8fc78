"""``manage.py explain_layout``: dump the triangular rank layout."""

# Local imports
from runs_app.api.serializers import ExplainLayoutSerializer
from runs_app.management.report import ReportCommand
from runs_app.services import explain_layout

from .solve import add_source_arguments


class Command(ReportCommand):
    help = "Print the rank map, process groups and vector segments for n_d partitions."

    serializer_class = ExplainLayoutSerializer

    def add_arguments(self, parser):
        parser.add_argument('--nd', type=int, required=True)
        add_source_arguments(parser)
        self.add_output_arguments(parser)

    def run(self, params):
        return explain_layout(params)
