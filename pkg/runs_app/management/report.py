"""Shared plumbing of the report-emitting management commands."""

# Standard library
import json
import logging

# Third-party imports
from django.core.management.base import BaseCommand, CommandError

# Local imports
from core.exceptions import BlockEigError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


def format_errors(errors):
    """Flatten serializer errors into one line per field."""
    lines = []
    for field, messages in errors.items():
        if isinstance(messages, dict):
            messages = [f"{key}: {value}" for key, value in messages.items()]
        for message in messages:
            lines.append(f"{field}: {message}")
    return '; '.join(lines)


class ReportCommand(BaseCommand):
    """Validate options with a serializer, run a service, print the JSON report.

    Subclasses set ``serializer_class`` and implement :meth:`run`. Options
    left at ``None`` fall back to the serializer defaults.
    """

    serializer_class = None
    out = None

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help="Write the report to this file instead of stdout.")

    def request_data(self, options):
        """Serializer input built from the parsed command-line options."""
        fields = self.serializer_class().fields
        return {key: value for key, value in options.items()
                if key in fields and value is not None}

    def run(self, params):
        raise NotImplementedError

    def emit(self, report):
        text = json.dumps(report, indent=2)
        if self.out:
            with open(self.out, 'w', encoding='utf-8') as fh:
                fh.write(text + '\n')
            logger.info("Report written to %s", self.out)
        else:
            self.stdout.write(text)

    def handle(self, *args, **options):
        self.out = options.get('out')
        serializer = self.serializer_class(data=self.request_data(options))
        if not serializer.is_valid():
            raise CommandError(format_errors(serializer.errors), returncode=USAGE_ERROR)
        try:
            report = self.run(serializer.validated_data)
        except BlockEigError as exc:
            partial = getattr(exc, 'report', None)
            if partial is not None:
                self.emit(partial)
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=exc.exit_code) from exc
        self.emit(report)
        return None
