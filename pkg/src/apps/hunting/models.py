"""Persistence for recorded Monte Carlo runs."""

from __future__ import annotations

from django.core.exceptions import ValidationError
from django.core.validators import MinValueValidator, RegexValidator
from django.db import models

from .rabbits import LatticeRabbit2D, LinearRabbit, PolynomialRabbit, RealLinearRabbit
from .strategies import SEED_MAX, StrategyKind

RABBIT_KIND_CHOICES = [
    (kind, kind)
    for kind in (
        LinearRabbit.kind,
        PolynomialRabbit.kind,
        RealLinearRabbit.kind,
        LatticeRabbit2D.kind,
    )
]
STRATEGY_KIND_CHOICES = [(kind.value, kind.value) for kind in StrategyKind]


class HuntRun(models.Model):
    """A ``montecarlo --record`` batch with its manifest and summary."""

    created_at = models.DateTimeField(auto_now_add=True)
    rabbit = models.CharField(max_length=255)
    rabbit_kind = models.CharField(max_length=32, choices=RABBIT_KIND_CHOICES)
    strategy = models.CharField(max_length=64)
    strategy_kind = models.CharField(max_length=32, choices=STRATEGY_KIND_CHOICES)
    # Unsigned 64-bit seeds overflow BigIntegerField.
    master_seed = models.CharField(
        max_length=20,
        validators=[RegexValidator(r"^\d{1,20}$", "Seeds are decimal digits.")],
    )
    trials = models.PositiveIntegerField(validators=[MinValueValidator(1)])
    cutoff = models.PositiveIntegerField(validators=[MinValueValidator(1)])
    censored_count = models.PositiveIntegerField()
    hit_fraction = models.FloatField()
    manifest = models.JSONField()
    summary = models.JSONField()

    class Meta:
        ordering = ("-created_at", "-id")
        indexes = [
            models.Index(
                fields=["rabbit_kind", "strategy_kind"], name="hunting_run_kinds_idx"
            )
        ]

    def __str__(self) -> str:
        return f"{self.rabbit} vs {self.strategy} (seed {self.master_seed})"

    def clean(self) -> None:
        super().clean()
        if self.master_seed.isdigit() and int(self.master_seed) > SEED_MAX:
            raise ValidationError({"master_seed": "Seeds are unsigned 64-bit."})
        if self.censored_count > self.trials:
            raise ValidationError(
                {"censored_count": "Cannot censor more trials than were run."}
            )
