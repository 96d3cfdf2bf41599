# Generated by Django 5.0.6 on 2026-10-18 09:12

import django.core.validators
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="HuntRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("rabbit", models.CharField(max_length=255)),
                (
                    "rabbit_kind",
                    models.CharField(
                        choices=[
                            ("linear", "linear"),
                            ("polynomial", "polynomial"),
                            ("real-linear", "real-linear"),
                            ("lattice", "lattice"),
                        ],
                        max_length=32,
                    ),
                ),
                ("strategy", models.CharField(max_length=64)),
                (
                    "strategy_kind",
                    models.CharField(
                        choices=[
                            ("diagonal", "diagonal"),
                            ("probabilistic", "probabilistic"),
                        ],
                        max_length=32,
                    ),
                ),
                (
                    "master_seed",
                    models.CharField(
                        max_length=20,
                        validators=[
                            django.core.validators.RegexValidator(
                                "^\\d{1,20}$", "Seeds are decimal digits."
                            )
                        ],
                    ),
                ),
                (
                    "trials",
                    models.PositiveIntegerField(
                        validators=[django.core.validators.MinValueValidator(1)]
                    ),
                ),
                (
                    "cutoff",
                    models.PositiveIntegerField(
                        validators=[django.core.validators.MinValueValidator(1)]
                    ),
                ),
                ("censored_count", models.PositiveIntegerField()),
                ("hit_fraction", models.FloatField()),
                ("manifest", models.JSONField()),
                ("summary", models.JSONField()),
            ],
            options={
                "ordering": ("-created_at", "-id"),
                "indexes": [
                    models.Index(
                        fields=["rabbit_kind", "strategy_kind"],
                        name="hunting_run_kinds_idx",
                    )
                ],
            },
        ),
    ]
