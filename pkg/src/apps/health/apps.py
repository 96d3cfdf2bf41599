from django.apps import AppConfig


class HealthConfig(AppConfig):
    """Database, migration and envelope-registry check."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.health"
    verbose_name = "Service health"
