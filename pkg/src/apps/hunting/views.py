"""Read-only compute endpoints and the recorded-run listing."""

from __future__ import annotations

from django.conf import settings
from django.core.exceptions import ValidationError as DjangoValidationError
from drf_spectacular.types import OpenApiTypes
from drf_spectacular.utils import OpenApiExample, OpenApiParameter, extend_schema
from rest_framework import status, viewsets
from rest_framework.exceptions import ValidationError
from rest_framework.response import Response
from rest_framework.views import APIView

from .analysis import (
    analytic_survival,
    deterministic_survival,
    envelope_validation,
    truncated_mean,
)
from .enumeration import Enumeration
from .envelopes import registered_envelopes
from .filters import HuntRunFilter
from .models import HuntRun
from .serializers import (
    EnumerationRowSerializer,
    EnvelopeSerializer,
    EnvelopeValidationSerializer,
    HuntOutcomeSerializer,
    HuntRequestSerializer,
    HuntRunSerializer,
    SurvivalCurveSerializer,
    SurvivalPointSerializer,
    SurvivalSummarySerializer,
)
from .simulation import run_hunt
from .specs import parse_rabbit, parse_strategy
from .strategies import derive_trial_seed, fresh_seed

MAX_ENUMERATION_ROWS = 10_000


def _drf_error(exc: DjangoValidationError) -> ValidationError:
    detail = exc.message_dict if hasattr(exc, "error_dict") else exc.messages
    return ValidationError(detail)


def _query_int(
    request, name: str, default: int | None = None  # noqa: ANN001
) -> int | None:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError({name: "Expected an integer."}) from exc


def _require_horizon(value: int | None, name: str = "horizon") -> int:
    limit = settings.RABBIT_HUNT_API_MAX_HORIZON
    if value is None or not 1 <= value <= limit:
        raise ValidationError({name: f"Give an integer between 1 and {limit}."})
    return value


class HuntRunViewSet(viewsets.ReadOnlyModelViewSet):
    """Monte Carlo batches stored with ``montecarlo --record``."""

    queryset = HuntRun.objects.all()
    serializer_class = HuntRunSerializer
    filterset_class = HuntRunFilter


class EnumerationView(APIView):
    """Rows of the Z^d enumeration, by prefix or by box."""

    @extend_schema(
        parameters=[
            OpenApiParameter("d", OpenApiTypes.INT, description="2, 3 or 4"),
            OpenApiParameter("count", OpenApiTypes.INT),
            OpenApiParameter("box", OpenApiTypes.INT),
        ],
        responses=EnumerationRowSerializer(many=True),
    )
    def get(self, request):  # noqa: ANN001
        count, radius = _query_int(request, "count"), _query_int(request, "box")
        if (count is None) == (radius is None):
            raise ValidationError({"count": "Give exactly one of count or box."})
        try:
            enumeration = Enumeration(_query_int(request, "d", 2))
            if count is not None:
                if count > MAX_ENUMERATION_ROWS:
                    raise ValidationError({"count": "Too many rows requested."})
                rows = list(enumeration.prefix(count))
            else:
                if radius < 0 or (2 * radius + 1) ** enumeration.dimension > (
                    MAX_ENUMERATION_ROWS
                ):
                    raise ValidationError({"box": "Box radius out of range."})
                rows = enumeration.box(radius)
        except DjangoValidationError as exc:
            raise _drf_error(exc) from exc
        payload = [{"index": k, "point": list(point)} for k, point in rows]
        return Response(EnumerationRowSerializer(payload, many=True).data)


class EnvelopeListView(APIView):
    """Registered envelope functions."""

    @extend_schema(responses=EnvelopeSerializer(many=True))
    def get(self, request):  # noqa: ANN001
        return Response(EnvelopeSerializer(registered_envelopes(), many=True).data)


class EnvelopeReportView(APIView):
    """``validate_h`` report for one envelope."""

    @extend_schema(
        parameters=[OpenApiParameter("horizon", OpenApiTypes.INT)],
        responses=EnvelopeValidationSerializer,
    )
    def get(self, request, name):  # noqa: ANN001
        horizon = _require_horizon(_query_int(request, "horizon", 10_000))
        try:
            result = envelope_validation(name, horizon)
        except DjangoValidationError as exc:
            if "envelope" in getattr(exc, "message_dict", {}):
                return Response(exc.message_dict, status=status.HTTP_404_NOT_FOUND)
            raise _drf_error(exc) from exc
        return Response(EnvelopeValidationSerializer(result).data)


class SurvivalView(APIView):
    """Analytic survival curve, thinned to every ``every``-th step."""

    @extend_schema(
        parameters=[
            OpenApiParameter("rabbit", OpenApiTypes.STR, required=True),
            OpenApiParameter("strategy", OpenApiTypes.STR, required=True),
            OpenApiParameter("horizon", OpenApiTypes.INT, required=True),
            OpenApiParameter("every", OpenApiTypes.INT),
        ],
        responses=SurvivalCurveSerializer,
    )
    def get(self, request):  # noqa: ANN001
        horizon = _require_horizon(_query_int(request, "horizon"))
        every = _query_int(request, "every", 1)
        if every < 1:
            raise ValidationError({"every": "Must be at least 1."})
        try:
            rabbit = parse_rabbit(request.query_params.get("rabbit", ""))
            strategy = parse_strategy(request.query_params.get("strategy", ""))
            strategy.check_pairing(rabbit)
            hit_step = None
            if strategy.seeded:
                curve = analytic_survival(rabbit, strategy.h(), horizon)
            else:
                hit_step = run_hunt(rabbit, strategy, horizon).step
                curve = deterministic_survival(hit_step, horizon)
        except DjangoValidationError as exc:
            raise _drf_error(exc) from exc

        points = [
            {"k": k, "p_k": float(curve.p_values[k - 1]), "S_k": curve.at(k)}
            for k in range(every, curve.horizon + 1, every)
        ]
        summary = {
            "rabbit": rabbit.spec,
            "strategy": strategy.spec,
            "horizon": curve.horizon,
            "final_survival": curve.at(curve.horizon),
            "truncated_mean": truncated_mean(curve),
            "hit_step": hit_step,
        }
        return Response(
            {
                "summary": SurvivalSummarySerializer(summary).data,
                "points": SurvivalPointSerializer(points, many=True).data,
            }
        )


class HuntView(APIView):
    """Run one hunt synchronously."""

    @extend_schema(
        request=HuntRequestSerializer,
        responses=HuntOutcomeSerializer,
        examples=[
            OpenApiExample(
                "Diagonal hit",
                request_only=True,
                value={
                    "rabbit": "linear:1,1",
                    "strategy": "diagonal:snake",
                    "cutoff": 100,
                },
            ),
            OpenApiExample(
                "Unknown envelope",
                response_only=True,
                status_codes=["400"],
                value={
                    "strategy": [
                        "Unknown envelope 'nope'; registered: k, k15, k2, "
                        "klogk, xloglog."
                    ]
                },
            ),
        ],
    )
    def post(self, request):  # noqa: ANN001
        serializer = HuntRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        seed = data.get("seed")
        if seed is None:
            seed = fresh_seed()
        strategy = data["strategy"]
        hunter_seed = derive_trial_seed(seed, 0) if strategy.seeded else None
        try:
            outcome = run_hunt(data["rabbit"], strategy, data["cutoff"], hunter_seed)
        except OverflowError as exc:
            raise ValidationError({"rabbit": str(exc)}) from exc
        payload = dict(HuntOutcomeSerializer(outcome).data)
        payload["seed"] = seed
        return Response(payload)
