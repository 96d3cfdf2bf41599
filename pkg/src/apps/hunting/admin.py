"""Admin registration for recorded runs."""

from django.contrib import admin
from django.contrib.admin import DateFieldListFilter

from .models import HuntRun


@admin.register(HuntRun)
class HuntRunAdmin(admin.ModelAdmin):
    list_display = (
        "rabbit",
        "strategy",
        "master_seed",
        "trials",
        "cutoff",
        "censored_count",
        "hit_fraction",
        "created_at",
    )
    list_filter = ("rabbit_kind", "strategy_kind", ("created_at", DateFieldListFilter))
    search_fields = ("rabbit", "strategy", "master_seed")
    readonly_fields = ("manifest", "summary", "created_at")
    date_hierarchy = "created_at"
