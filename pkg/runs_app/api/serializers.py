"""Serializers for run requests and the JSON reports."""

# Standard library
import math

# Third-party imports
from rest_framework import serializers

# Local imports
from core.conf import blockeig_setting
from runs_app.synthetic import KINDS
from spmm_app.kernels import KernelTag
from spmm_app.matrix import MAX_BLOCK_EXTENT

VARIANT_CHOICES = [tag.value for tag in KernelTag]
SWEEP_AXES = ('cache', 'vector')


def _setting(name):
    """Callable default reading ``settings.BLOCKEIG`` at validation time."""
    return lambda: blockeig_setting(name)


class FiniteFloatField(serializers.FloatField):
    """FloatField that rejects NaN and infinities."""

    default_error_messages = {'not_finite': 'Value must be finite.'}

    def to_internal_value(self, data):
        """Convert and check finiteness.

        Args:
            data: Raw input value.

        Returns:
            float: The validated value.
        """
        value = super().to_internal_value(data)
        if not math.isfinite(value):
            self.fail('not_finite')
        return value


class ProblemSourceSerializer(serializers.Serializer):
    """Where the matrix comes from: a Matrix Market file or a generator."""

    source_required = True

    matrix = serializers.CharField(required=False)
    gen = serializers.ChoiceField(choices=KINDS, required=False)
    n = serializers.IntegerField(min_value=1, required=False)
    density = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.01)
    bandwidth = serializers.IntegerField(min_value=0, default=3)
    max_tile = serializers.IntegerField(min_value=1, default=64)
    dominance = serializers.FloatField(min_value=0.0, default=0.0)
    block_size = serializers.IntegerField(min_value=1, default=_setting('BLOCK_SIZE'))
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs):
        """Check that exactly one matrix source is given.

        Args:
            attrs (dict): Input field values.

        Returns:
            dict: Validated attributes.

        Raises:
            serializers.ValidationError: Both or (when required) neither
                source is given, or a generator lacks ``n``.
        """
        has_matrix, has_gen = 'matrix' in attrs, 'gen' in attrs
        if has_matrix and has_gen:
            raise serializers.ValidationError("Give either matrix or gen, not both.")
        if self.source_required and not (has_matrix or has_gen):
            raise serializers.ValidationError("Give a matrix file or a generator kind.")
        if has_gen and 'n' not in attrs:
            raise serializers.ValidationError({'n': "A generated matrix needs its dimension."})
        return attrs


class SolveRequestSerializer(ProblemSourceSerializer):
    """Flags of the ``solve`` command and the body of ``POST /api/solve/``."""

    k = serializers.IntegerField(min_value=1)
    nb = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    tol = FiniteFloatField(default=_setting('TOL'))
    maxiter = serializers.IntegerField(min_value=1, default=_setting('MAXITER'))
    fom_iters = serializers.IntegerField(
        min_value=1, max_value=MAX_BLOCK_EXTENT, default=_setting('FOM_ITERATIONS')
    )
    precond = serializers.BooleanField(default=True)
    variant = serializers.ChoiceField(choices=VARIANT_CHOICES, default=KernelTag.BASELINE.value)
    cache_size = serializers.IntegerField(min_value=1, default=_setting('CACHE_SIZE'))
    vector_width = serializers.IntegerField(min_value=1, default=_setting('VECTOR_WIDTH'))
    nd = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    threads = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    strict = serializers.BooleanField(default=False)
    timings = serializers.BooleanField(default=True)
    cache = serializers.CharField(required=False)

    def validate_tol(self, value):
        """Reject a non-positive tolerance.

        Args:
            value (float): Requested tolerance.

        Returns:
            float: The tolerance.

        Raises:
            serializers.ValidationError: ``value`` is zero or negative.
        """
        if value <= 0.0:
            raise serializers.ValidationError("Tolerance must be positive.")
        return value

    def validate(self, attrs):
        """Check the block width against k.

        Args:
            attrs (dict): Input field values.

        Returns:
            dict: Validated attributes.
        """
        attrs = super().validate(attrs)
        if attrs.get('nb') is not None and attrs['nb'] < attrs['k']:
            raise serializers.ValidationError({'nb': "Block width must be at least k."})
        return attrs


class BenchRequestSerializer(ProblemSourceSerializer):
    """Flags of the ``bench`` command."""

    nb = serializers.IntegerField(min_value=1, default=8)
    variants = serializers.ListField(
        child=serializers.ChoiceField(choices=VARIANT_CHOICES), default=list(VARIANT_CHOICES)
    )
    sweep = serializers.ListField(child=serializers.CharField(), default=list)
    repeat = serializers.IntegerField(min_value=1, default=3)
    threads = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    cache = serializers.CharField(required=False)

    def validate_sweep(self, value):
        """Parse ``axis=v1,v2,...`` entries into a dict of value lists.

        Args:
            value (list[str]): Raw sweep entries.

        Returns:
            dict: Axis to a list of positive ints, every axis present.

        Raises:
            serializers.ValidationError: Unknown axis or bad values.
        """
        grid = {
            'cache': [blockeig_setting('CACHE_SIZE')],
            'vector': [blockeig_setting('VECTOR_WIDTH')],
        }
        for entry in value:
            axis, sep, raw = entry.partition('=')
            if not sep or axis not in SWEEP_AXES:
                raise serializers.ValidationError(
                    f"Sweep entries look like cache=64,256 or vector=128; got {entry!r}."
                )
            try:
                values = [int(v) for v in raw.split(',')]
            except ValueError as exc:
                raise serializers.ValidationError(f"Non-integer value in {entry!r}.") from exc
            if not values or min(values) < 1:
                raise serializers.ValidationError(f"Sweep values must be positive in {entry!r}.")
            grid[axis] = values
        return grid


class ExplainLayoutSerializer(ProblemSourceSerializer):
    """Flags of the ``explain_layout`` command and ``GET /api/layout/<nd>/``."""

    source_required = False

    nd = serializers.IntegerField(min_value=1)


class IterationSerializer(serializers.Serializer):
    """One history entry of a solve report."""

    iteration = serializers.IntegerField(min_value=1)
    theta = serializers.ListField(child=FiniteFloatField())
    residual_norms = serializers.ListField(child=FiniteFloatField(min_value=0.0))
    n_converged = serializers.IntegerField(min_value=0)
    timings = serializers.DictField(child=FiniteFloatField(), required=False)


class RunReportSerializer(serializers.Serializer):
    """Schema of the ``solve`` report."""

    schema_version = serializers.IntegerField()
    command = serializers.ChoiceField(choices=['solve'])
    source = serializers.CharField()
    n = serializers.IntegerField(min_value=1)
    nnz = serializers.IntegerField(min_value=0)
    config = serializers.DictField()
    operator = serializers.CharField()
    eigenvalues = serializers.ListField(child=FiniteFloatField())
    residual_norms = serializers.ListField(child=FiniteFloatField(min_value=0.0))
    converged = serializers.BooleanField()
    n_converged = serializers.IntegerField(min_value=0)
    iterations = serializers.IntegerField(min_value=0)
    operator_calls = serializers.IntegerField(min_value=1)
    precond_fallbacks = serializers.IntegerField(min_value=0)
    basis_repairs = serializers.IntegerField(min_value=0)
    history = IterationSerializer(many=True)
    timings = serializers.DictField(child=FiniteFloatField(), required=False)
    tiles = serializers.DictField(allow_null=True)
    distributed = serializers.DictField(allow_null=True)


class BenchRowSerializer(serializers.Serializer):
    """One timed kernel configuration."""

    variant = serializers.ChoiceField(choices=VARIANT_CHOICES)
    label = serializers.CharField()
    cache_size = serializers.IntegerField(allow_null=True)
    vector_width = serializers.IntegerField(allow_null=True)
    seconds = FiniteFloatField(min_value=0.0, allow_null=True)
    rel_error = FiniteFloatField(min_value=0.0)
    passed = serializers.BooleanField()

    def validate(self, attrs):
        """A failed gate must not carry a timing."""
        if not attrs['passed'] and attrs['seconds'] is not None:
            raise serializers.ValidationError("Timing reported for a failed kernel.")
        return attrs


class BenchReportSerializer(serializers.Serializer):
    """Schema of the ``bench`` report."""

    schema_version = serializers.IntegerField()
    command = serializers.ChoiceField(choices=['bench'])
    source = serializers.CharField()
    n = serializers.IntegerField(min_value=1)
    nnz = serializers.IntegerField(min_value=0)
    nb = serializers.IntegerField(min_value=1)
    threads = serializers.IntegerField(min_value=1)
    repeat = serializers.IntegerField(min_value=1)
    gate_tolerance = FiniteFloatField(min_value=0.0)
    grid = BenchRowSerializer(many=True)
    gates_passed = serializers.BooleanField()


class LayoutReportSerializer(serializers.Serializer):
    """Schema of the ``explain_layout`` report."""

    schema_version = serializers.IntegerField()
    command = serializers.ChoiceField(choices=['explain_layout'])
    n_d = serializers.IntegerField(min_value=1)
    n = serializers.IntegerField(min_value=1)
    n_ranks = serializers.IntegerField(min_value=1)
    group_size = serializers.IntegerField(min_value=1)
    boundaries = serializers.ListField(child=serializers.IntegerField(min_value=0))
    ranks = serializers.ListField(child=serializers.DictField())
    row_groups = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
    col_groups = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
    diagonal_ranks = serializers.ListField(child=serializers.IntegerField())
    segments = serializers.ListField(child=serializers.ListField(child=serializers.DictField()))
    balance = serializers.DictField(allow_null=True)
