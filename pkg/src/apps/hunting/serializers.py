"""Serializers shared by the hunting API and the management commands."""

from __future__ import annotations

from django.conf import settings
from django.core.exceptions import ValidationError
from drf_spectacular.utils import extend_schema_field
from rest_framework import serializers

from apps.common.serializers import FiniteFloatField, SeedField

from .models import HuntRun
from .specs import parse_rabbit, parse_strategy


def _as_drf_error(exc: ValidationError) -> serializers.ValidationError:
    detail = exc.message_dict if hasattr(exc, "error_dict") else exc.messages
    return serializers.ValidationError(detail)


class HuntOutcomeSerializer(serializers.Serializer):
    """Result of a single hunt."""

    hit = serializers.BooleanField()
    step = serializers.IntegerField(allow_null=True)
    censored_at = serializers.IntegerField(allow_null=True)
    guesses_count = serializers.IntegerField()


class HuntRequestSerializer(serializers.Serializer):
    """Input for ``POST /api/hunts/``."""

    rabbit = serializers.CharField(max_length=255)
    strategy = serializers.CharField(max_length=64)
    cutoff = serializers.IntegerField(min_value=1)
    seed = SeedField(required=False, allow_null=True)

    def validate_cutoff(self, value: int) -> int:
        if value > settings.RABBIT_HUNT_API_MAX_HORIZON:
            raise serializers.ValidationError(
                f"At most {settings.RABBIT_HUNT_API_MAX_HORIZON} steps per request."
            )
        return value

    def validate_rabbit(self, value: str):  # noqa: ANN201
        try:
            return parse_rabbit(value)
        except ValidationError as exc:
            raise serializers.ValidationError(exc.messages) from exc

    def validate_strategy(self, value: str):  # noqa: ANN201
        try:
            return parse_strategy(value)
        except ValidationError as exc:
            raise serializers.ValidationError(exc.messages) from exc

    def validate(self, attrs):  # noqa: ANN001, ANN201
        rabbit, strategy = attrs.get("rabbit"), attrs.get("strategy")
        if rabbit is not None and strategy is not None:
            try:
                strategy.check_pairing(rabbit)
            except ValidationError as exc:
                raise _as_drf_error(exc) from exc
        return attrs


class EnvelopeSerializer(serializers.Serializer):
    """Registry entry for an envelope function."""

    name = serializers.CharField()
    description = serializers.CharField()
    divergence_class = serializers.CharField()
    dominates_affine = serializers.BooleanField(allow_null=True)


class GrowthRatioSerializer(serializers.Serializer):
    j = serializers.IntegerField()
    ratio = FiniteFloatField()


class PartialSumSerializer(serializers.Serializer):
    m = serializers.IntegerField()
    sum = FiniteFloatField()


class SandwichRowSerializer(serializers.Serializer):
    """One checkpoint of the integral-test bounds."""

    m = serializers.IntegerField()
    lower = FiniteFloatField()
    floored = FiniteFloatField()
    companion = FiniteFloatField()
    upper = FiniteFloatField()
    passes = serializers.BooleanField()


class EnvelopeReportSerializer(serializers.Serializer):
    """Validation report for an envelope over ``1..horizon``."""

    name = serializers.CharField()
    horizon = serializers.IntegerField()
    valid = serializers.BooleanField()
    accepted = serializers.BooleanField()
    monotone = serializers.BooleanField()
    first_decrease = serializers.IntegerField(allow_null=True)
    grows = serializers.BooleanField()
    superlinear = serializers.BooleanField()
    superlinear_evidence = serializers.BooleanField()
    superlinear_basis = serializers.CharField()
    divergence_class = serializers.CharField()
    growth_ratios = serializers.SerializerMethodField()
    reciprocal_sums = serializers.SerializerMethodField()

    @extend_schema_field(GrowthRatioSerializer(many=True))
    def get_growth_ratios(self, report) -> list:  # noqa: ANN001
        return [{"j": j, "ratio": ratio} for j, ratio in report.growth_ratios]

    @extend_schema_field(PartialSumSerializer(many=True))
    def get_reciprocal_sums(self, report) -> list:  # noqa: ANN001
        return [{"m": m, "sum": value} for m, value in report.reciprocal_sums]


class SurvivalPointSerializer(serializers.Serializer):
    """One row of an analytic survival curve."""

    k = serializers.IntegerField()
    p_k = FiniteFloatField()
    S_k = FiniteFloatField()


class SurvivalSummarySerializer(serializers.Serializer):
    rabbit = serializers.CharField()
    strategy = serializers.CharField()
    horizon = serializers.IntegerField()
    final_survival = FiniteFloatField()
    truncated_mean = FiniteFloatField()
    hit_step = serializers.IntegerField(allow_null=True)


class MeanExcessSerializer(serializers.Serializer):
    """Sample mean of ``min(T, horizon)`` beside its analytic value."""

    horizon = serializers.IntegerField()
    mean = FiniteFloatField()
    stderr = FiniteFloatField()
    analytic = FiniteFloatField(allow_null=True, required=False)


class AgreementSerializer(serializers.Serializer):
    sampled = serializers.IntegerField()
    passing = serializers.IntegerField()
    fraction = FiniteFloatField()
    hit_fraction = FiniteFloatField()
    expected_hit_fraction = FiniteFloatField()
    hit_fraction_stderr = FiniteFloatField()
    hit_fraction_agrees = serializers.BooleanField()
    passes = serializers.BooleanField()


class BatchSummarySerializer(serializers.Serializer):
    """``summary.json`` of a Monte Carlo batch."""

    rabbit = serializers.CharField()
    strategy = serializers.CharField()
    master_seed = SeedField()
    trials = serializers.IntegerField()
    cutoff = serializers.IntegerField()
    hits = serializers.IntegerField()
    censored_count = serializers.IntegerField()
    hit_fraction = FiniteFloatField()
    truncated_means = MeanExcessSerializer(many=True)
    agreement = AgreementSerializer(allow_null=True, required=False)


class RunManifestSerializer(serializers.Serializer):
    """Everything needed to re-run a command and reproduce its files."""

    command = serializers.CharField()
    version = serializers.CharField()
    master_seed = SeedField(allow_null=True)
    config = serializers.DictField()
    outputs = serializers.ListField(child=serializers.CharField())


class EnumerationRowSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    point = serializers.ListField(child=serializers.IntegerField())


class HuntRunSerializer(serializers.ModelSerializer):
    """Recorded Monte Carlo batch."""

    class Meta:
        model = HuntRun
        fields = [
            "id",
            "created_at",
            "rabbit",
            "rabbit_kind",
            "strategy",
            "strategy_kind",
            "master_seed",
            "trials",
            "cutoff",
            "censored_count",
            "hit_fraction",
            "manifest",
            "summary",
        ]
        read_only_fields = fields


class EnvelopeValidationSerializer(serializers.Serializer):
    """Output of ``validate_h``: the report plus the integral-test sandwich."""

    report = EnvelopeReportSerializer()
    sandwich = SandwichRowSerializer(many=True, allow_null=True)
    sandwich_passes = serializers.BooleanField(allow_null=True)


class SurvivalCurveSerializer(serializers.Serializer):
    summary = SurvivalSummarySerializer()
    points = SurvivalPointSerializer(many=True)
