"""API views serving layout dumps and solve reports."""

# Third-party imports
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

# Local imports
from core.exceptions import BlockEigError, InputError
from runs_app.services import explain_layout, run_solve

from .serializers import ExplainLayoutSerializer, SolveRequestSerializer

FILE_FIELDS = ('matrix', 'cache')


def error_response(exc):
    """Map a domain error to 400 (bad input) or 422 (numerical failure).

    Args:
        exc (BlockEigError): The raised error.

    Returns:
        Response: ``error`` type and ``detail`` message.
    """
    code = status.HTTP_400_BAD_REQUEST if isinstance(exc, InputError) else (
        status.HTTP_422_UNPROCESSABLE_ENTITY
    )
    body = {'error': type(exc).__name__, 'detail': str(exc)}
    report = getattr(exc, 'report', None)
    if report is not None:
        body['report'] = report
    return Response(body, status=code)


class LayoutView(APIView):
    """Handle GET /api/layout/{nd}/?n=..."""

    def get(self, request, nd):
        """Return the layout report for ``nd`` partitions.

        Args:
            request: HTTP request, optional ``n`` query parameter.
            nd (int): Partition count.

        Returns:
            Response: Layout report (200) or errors (400).
        """
        data = {'nd': nd}
        if 'n' in request.query_params:
            data['n'] = request.query_params['n']
        serializer = ExplainLayoutSerializer(data=data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            return Response(explain_layout(serializer.validated_data))
        except BlockEigError as exc:
            return error_response(exc)


class SolveView(APIView):
    """Handle POST /api/solve/ - generated matrices only."""

    def post(self, request):
        """Run a solve and return its report.

        Args:
            request: HTTP request with SolveRequestSerializer fields.

        Returns:
            Response: RunReport (200), validation errors (400) or a
            numerical failure (422).
        """
        serializer = SolveRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        params = serializer.validated_data
        if any(field in params for field in FILE_FIELDS):
            return Response(
                {'detail': "File inputs are only available from the command line."},
                status=status.HTTP_400_BAD_REQUEST,
            )
        try:
            return Response(run_solve(params))
        except BlockEigError as exc:
            return error_response(exc)
