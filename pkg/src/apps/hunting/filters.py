"""FilterSet definitions for recorded runs."""

from __future__ import annotations

import django_filters

from .models import HuntRun


class HuntRunFilter(django_filters.FilterSet):
    """Filter runs by rabbit and strategy kind, seed and creation time."""

    created_after = django_filters.IsoDateTimeFilter(
        field_name="created_at", lookup_expr="gte"
    )
    created_before = django_filters.IsoDateTimeFilter(
        field_name="created_at", lookup_expr="lte"
    )

    class Meta:
        model = HuntRun
        fields = {
            "rabbit_kind": ["exact"],
            "strategy_kind": ["exact"],
            "master_seed": ["exact"],
            "rabbit": ["exact", "icontains"],
            "cutoff": ["exact", "gte", "lte"],
        }
