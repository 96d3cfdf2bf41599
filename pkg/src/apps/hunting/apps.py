from django.apps import AppConfig


class HuntingConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.hunting"
    verbose_name = "Rabbit Hunting"
