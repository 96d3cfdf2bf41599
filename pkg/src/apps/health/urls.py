"""Routes for the service health check."""

from django.urls import path

from .views import health_check

app_name = "health"

urlpatterns = [
    path("health/", health_check, name="health"),
]
