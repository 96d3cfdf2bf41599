"""Routing for the hunting API."""

from __future__ import annotations

from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import (
    EnumerationView,
    EnvelopeListView,
    EnvelopeReportView,
    HuntRunViewSet,
    HuntView,
    SurvivalView,
)

router = DefaultRouter()
router.register(r"runs", HuntRunViewSet, basename="run")

urlpatterns = [
    path("", include(router.urls)),
    path("enumeration/", EnumerationView.as_view(), name="enumeration"),
    path("envelopes/", EnvelopeListView.as_view(), name="envelope-list"),
    path(
        "envelopes/<str:name>/report/",
        EnvelopeReportView.as_view(),
        name="envelope-report",
    ),
    path("survival/", SurvivalView.as_view(), name="survival"),
    path("hunts/", HuntView.as_view(), name="hunt"),
]
