"""Reusable serializer components for the Rabbit Hunt project."""

from __future__ import annotations

import math
from typing import Any

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

SEED_MAX = 2**64 - 1


class FiniteFloatField(serializers.FloatField):
    """Float field that refuses NaN and infinities in both directions."""

    default_error_messages = {
        "non_finite": "Only finite numbers are allowed.",
    }

    def to_internal_value(self, data: Any) -> float:  # noqa: ANN401
        value = super().to_internal_value(data)
        if not math.isfinite(value):
            self.fail("non_finite")
        return value

    def to_representation(self, value: Any) -> float:  # noqa: ANN401
        result = float(value)
        if not math.isfinite(result):
            raise ValueError(f"Refusing to serialize non-finite value {result!r}")
        return result


class SeedField(serializers.IntegerField):
    """Unsigned 64-bit seed."""

    def __init__(self, **kwargs: Any) -> None:  # noqa: ANN401
        kwargs.setdefault("min_value", 0)
        kwargs.setdefault("max_value", SEED_MAX)
        super().__init__(**kwargs)


def render_json(data: Any) -> bytes:  # noqa: ANN401
    """Compact JSON in serializer field order, newline terminated."""

    return JSONRenderer().render(data) + b"\n"
