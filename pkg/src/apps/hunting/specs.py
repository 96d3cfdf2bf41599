"""Parsers for the ``kind:comma-separated-params`` rabbit and strategy syntax.

Examples: ``linear:5,-3``, ``polynomial:0,0,1``, ``real-linear:0.3,1.0``,
``lattice:1,2,3,4``, ``diagonal:snake``, ``diagonal:d3``,
``probabilistic:klogk``.
"""

from __future__ import annotations

import re

from django.core.exceptions import ValidationError

from .rabbits import (
    AnyRabbit,
    LatticeRabbit2D,
    LinearRabbit,
    PolynomialRabbit,
    RealLinearRabbit,
)
from .strategies import StrategyKind, StrategySpec

_INTEGER_LITERAL = re.compile(r"^[+-]?\d+$")
_DIAGONAL_ALIASES = {"snake": 2, "d2": 2, "d3": 3, "d4": 4, "2": 2, "3": 3, "4": 4}


def _split(text: str, field: str) -> tuple[str, list[str]]:
    if not isinstance(text, str) or ":" not in text:
        raise ValidationError({field: f"Expected 'kind:params', got {text!r}."})
    kind, _, raw = text.strip().partition(":")
    params = [p.strip() for p in raw.split(",")] if raw.strip() else []
    return kind.strip().lower(), params


def _integers(params: list[str], count: int | None, field: str) -> list[int]:
    if count is not None and len(params) != count:
        raise ValidationError(
            {field: f"Expected {count} parameters, got {len(params)}."}
        )
    if not params:
        raise ValidationError({field: "At least one parameter is required."})
    for p in params:
        if not _INTEGER_LITERAL.match(p):
            raise ValidationError({field: f"'{p}' is not an integer literal."})
    return [int(p) for p in params]


def parse_rabbit(text: str) -> AnyRabbit:
    """Build a rabbit from ``linear:a,b`` style text."""

    kind, params = _split(text, "rabbit")
    if kind == LinearRabbit.kind:
        return LinearRabbit(*_integers(params, 2, "rabbit"))
    if kind == PolynomialRabbit.kind:
        return PolynomialRabbit(tuple(_integers(params, None, "rabbit")))
    if kind == LatticeRabbit2D.kind:
        return LatticeRabbit2D(*_integers(params, 4, "rabbit"))
    if kind == RealLinearRabbit.kind:
        if len(params) != 2:
            raise ValidationError(
                {"rabbit": f"Expected 2 parameters, got {len(params)}."}
            )
        try:
            return RealLinearRabbit(*params)
        except ValidationError as exc:
            raise ValidationError({"rabbit": exc.messages}) from exc
    raise ValidationError({"rabbit": f"Unknown rabbit kind '{kind}'."})


def parse_strategy(text: str) -> StrategySpec:
    """Build a strategy from ``diagonal:snake`` or ``probabilistic:<envelope>``."""

    kind, params = _split(text, "strategy")
    if len(params) != 1:
        raise ValidationError({"strategy": "Strategies take exactly one argument."})
    (argument,) = params
    if kind == StrategyKind.DIAGONAL:
        try:
            dimension = _DIAGONAL_ALIASES[argument.lower()]
        except KeyError as exc:
            raise ValidationError(
                {"strategy": f"Unknown enumeration '{argument}'."}
            ) from exc
        return StrategySpec(StrategyKind.DIAGONAL, dimension=dimension)
    if kind == StrategyKind.PROBABILISTIC:
        return StrategySpec(StrategyKind.PROBABILISTIC, envelope=argument)
    raise ValidationError({"strategy": f"Unknown strategy kind '{kind}'."})
