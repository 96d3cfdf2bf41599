"""Health endpoint for the Rabbit Hunt service."""

from __future__ import annotations

from typing import Any

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import connection
from django.db.migrations.executor import MigrationExecutor
from django.db.utils import OperationalError
from django.utils import timezone
from rest_framework.decorators import api_view
from rest_framework.response import Response

from apps.hunting.envelopes import HFunction, registered_envelopes

CHECK_STEPS = (1, 2, 10, 1000)


def _check_envelope(h: HFunction) -> str | None:
    """Return a failure description, or ``None`` when ``h`` looks sane."""

    try:
        scalar = [h(n) for n in CHECK_STEPS]
        vector = h.values(np.array(CHECK_STEPS, dtype=np.int64)).tolist()
    except (ArithmeticError, ValidationError, ValueError, TypeError) as exc:
        return f"{type(exc).__name__}: {exc}"
    if scalar != vector:
        return "scalar and vectorised values disagree"
    return None


def _envelope_status() -> dict[str, Any]:
    envelopes = registered_envelopes()
    failures = {
        h.name: problem
        for h in envelopes
        if (problem := _check_envelope(h)) is not None
    }
    return {
        "status": "error" if failures else "ok",
        "registered": [h.name for h in envelopes],
        **({"failures": failures} if failures else {}),
    }


def _pending_migrations() -> list[str]:
    executor = MigrationExecutor(connection)
    plan = executor.migration_plan(executor.loader.graph.leaf_nodes())
    return [f"{migration.app_label}.{migration.name}" for migration, _ in plan]


@api_view(["GET"])
def health_check(_request):  # noqa: ANN001
    """Report database, migrations and whether every envelope evaluates."""

    payload: dict[str, Any] = {
        "status": "ok",
        "version": settings.RABBIT_HUNT_VERSION,
        "timestamp": timezone.now(),
        "database": {"status": "ok"},
        "migrations": {"status": "ok", "pending": []},
        "envelopes": _envelope_status(),
    }
    status_code = 200

    try:
        connection.ensure_connection()
    except OperationalError as exc:
        payload["status"] = "error"
        payload["database"] = {"status": "error", "details": str(exc)}
        payload["migrations"] = {"status": "unknown", "pending": []}
        status_code = 503
    else:
        if pending := _pending_migrations():
            payload["status"] = "degraded"
            payload["migrations"] = {"status": "pending", "pending": pending}

    if payload["envelopes"]["status"] == "error" and payload["status"] == "ok":
        payload["status"] = "degraded"

    return Response(payload, status=status_code)
