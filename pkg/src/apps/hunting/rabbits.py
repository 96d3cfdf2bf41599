"""Rabbit trajectories and the hit predicates that decide a hammer throw."""

from __future__ import annotations

import math
import operator
import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import ClassVar, Protocol, runtime_checkable

import numpy as np
from django.core.exceptions import ValidationError

INT64_MAX = 2**63 - 1
HIT_TOLERANCE = 0.5

_DECIMAL_LITERAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def require_step(n: object, field: str = "n") -> int:
    """Return ``n`` as a 1-based time step or raise ``ValidationError``."""

    step = as_integer(n, field)
    if step < 1:
        raise ValidationError({field: "Time steps start at 1."})
    return step


def as_integer(value: object, field: str) -> int:
    """Coerce integer-like values without ever rounding."""

    if isinstance(value, bool):
        raise ValidationError({field: "Expected an integer, not a boolean."})
    try:
        return operator.index(value)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ValidationError({field: f"Expected an integer, got {value!r}."}) from exc


def as_real(value: object, field: str) -> float:
    """Coerce a finite real parameter to a 64-bit float."""

    if isinstance(value, bool):
        raise ValidationError({field: "Expected a real number, not a boolean."})
    if isinstance(value, str):
        if not _DECIMAL_LITERAL.match(value.strip()):
            raise ValidationError({field: f"'{value}' is not a decimal literal."})
        value = float(value)
    if not isinstance(value, int | float | np.integer | np.floating):
        raise ValidationError({field: f"Expected a real number, got {value!r}."})
    result = float(value)
    if not math.isfinite(result):
        raise ValidationError({field: "Real parameters must be finite."})
    return result


def int64_bound(coefficients: Sequence[int], horizon: int) -> int:
    """Largest ``|sum c_i n^i|`` over ``1 <= n <= horizon`` as an exact integer."""

    return sum(abs(c) * horizon**i for i, c in enumerate(coefficients))


def _require_int64(coefficients: Sequence[int], horizon: int) -> None:
    if int64_bound(coefficients, horizon) > INT64_MAX:
        raise OverflowError(
            f"trajectory exceeds the int64 range before step {horizon}; "
            "use the exact per-step path"
        )


def _as_steps(steps: np.ndarray) -> np.ndarray:
    steps = np.asarray(steps, dtype=np.int64)
    if steps.size and steps.min() < 1:
        raise ValidationError({"steps": "Time steps start at 1."})
    return steps


def _horner(coefficients: Sequence[int], n: int) -> int:
    value = 0
    for c in reversed(coefficients):
        value = value * n + c
    return value


@runtime_checkable
class RabbitModel(Protocol):
    """Common surface shared by every trajectory model."""

    kind: ClassVar[str]

    @property
    def parameters(self) -> tuple[int | float, ...]: ...

    @property
    def spec(self) -> str: ...

    def position(self, n: int) -> object: ...

    def is_hit(self, guess: object, n: int) -> bool: ...


class _IntegerLineRabbit:
    """Shared machinery for integer trajectories on the number line."""

    kind: ClassVar[str]
    target: ClassVar[str] = "line"

    @property
    def coefficients(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def parameters(self) -> tuple[int, ...]:
        return self.coefficients

    @property
    def spec(self) -> str:
        return f"{self.kind}:" + ",".join(str(c) for c in self.parameters)

    def position(self, n: int) -> int:
        return _horner(self.coefficients, require_step(n))

    def is_hit(self, guess: object, n: int) -> bool:
        return as_integer(guess, "guess") == self.position(n)

    def positions(self, steps: np.ndarray) -> np.ndarray:
        """Vectorized ``R_n``; raises ``OverflowError`` past the int64 range."""

        steps = _as_steps(steps)
        if not steps.size:
            return np.empty(0, dtype=np.int64)
        _require_int64(self.coefficients, int(steps.max()))
        acc = np.full(steps.shape, self.coefficients[-1], dtype=np.int64)
        for c in reversed(self.coefficients[:-1]):
            acc = acc * steps + c
        return acc

    def matches(self, steps: np.ndarray, guesses: np.ndarray) -> np.ndarray:
        """Element-wise hit mask for a block of integer guesses."""

        try:
            return self.positions(steps) == guesses
        except OverflowError:
            return np.fromiter(
                (
                    self.is_hit(int(g), int(n))
                    for n, g in zip(steps, guesses, strict=True)
                ),
                dtype=bool,
                count=len(steps),
            )

    def hit_count(self, n: int, radius: int) -> int:
        """Support points of ``{-radius..radius}`` that strike the rabbit."""

        return int(abs(self.position(n)) <= radius)

    def hit_counts(self, steps: np.ndarray, radii: np.ndarray) -> np.ndarray:
        try:
            return (np.abs(self.positions(steps)) <= radii).astype(np.int64)
        except OverflowError:
            return np.fromiter(
                (self.hit_count(int(n), int(r)) for n, r in zip(steps, radii)),
                dtype=np.int64,
                count=len(steps),
            )


@dataclass(frozen=True)
class LinearRabbit(_IntegerLineRabbit):
    """``R_n = a + b*n`` with integer start ``a`` and stride ``b``."""

    kind: ClassVar[str] = "linear"

    a: int
    b: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_integer(self.a, "a"))
        object.__setattr__(self, "b", as_integer(self.b, "b"))

    @property
    def coefficients(self) -> tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class PolynomialRabbit(_IntegerLineRabbit):
    """``R_n = sum c_i n^i``; coefficients are listed in ascending degree."""

    kind: ClassVar[str] = "polynomial"

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if isinstance(self.coeffs, str | bytes) or not len(self.coeffs):
            raise ValidationError({"coeffs": "At least one coefficient is required."})
        coeffs = tuple(
            as_integer(c, f"coeffs[{i}]") for i, c in enumerate(self.coeffs)
        )
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class RealLinearRabbit:
    """``R_n = a + b*n`` over the reals, struck within half a unit."""

    kind: ClassVar[str] = "real-linear"
    target: ClassVar[str] = "line"

    a: float
    b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_real(self.a, "a"))
        object.__setattr__(self, "b", as_real(self.b, "b"))

    @property
    def parameters(self) -> tuple[float, ...]:
        return (self.a, self.b)

    @property
    def spec(self) -> str:
        return f"{self.kind}:{self.a!r},{self.b!r}"

    def position(self, n: int) -> float:
        value = self.a + self.b * require_step(n)
        if not math.isfinite(value):
            raise OverflowError(f"real trajectory left the float64 range at step {n}")
        return value

    def is_hit(self, guess: object, n: int) -> bool:
        # Closed inequality: an exact half-unit miss still counts as a hit.
        return abs(self.position(n) - as_integer(guess, "guess")) <= HIT_TOLERANCE

    def positions(self, steps: np.ndarray) -> np.ndarray:
        steps = _as_steps(steps)
        values = self.a + self.b * steps.astype(np.float64)
        if not np.all(np.isfinite(values)):
            raise OverflowError("real trajectory left the float64 range")
        return values

    def matches(self, steps: np.ndarray, guesses: np.ndarray) -> np.ndarray:
        return np.abs(self.positions(steps) - guesses) <= HIT_TOLERANCE

    def hit_count(self, n: int, radius: int) -> int:
        value = self.position(n)
        base = math.floor(value)
        return sum(
            1
            for g in (base, base + 1)
            if abs(g) <= radius and abs(value - g) <= HIT_TOLERANCE
        )

    def hit_counts(self, steps: np.ndarray, radii: np.ndarray) -> np.ndarray:
        values = self.positions(steps)
        base = np.floor(values)
        counts = np.zeros(values.shape, dtype=np.int64)
        for candidate in (base, base + 1):
            counts += (np.abs(candidate) <= radii) & (
                np.abs(values - candidate) <= HIT_TOLERANCE
            )
        return counts


@dataclass(frozen=True)
class LatticeRabbit2D:
    """``R_n = (a1 + n*b1, a2 + n*b2)`` on the integer lattice."""

    kind: ClassVar[str] = "lattice"
    target: ClassVar[str] = "lattice"

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self) -> None:
        for field in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, field, as_integer(getattr(self, field), field))

    @property
    def parameters(self) -> tuple[int, ...]:
        return (self.a1, self.a2, self.b1, self.b2)

    @property
    def spec(self) -> str:
        return f"{self.kind}:" + ",".join(str(c) for c in self.parameters)

    def position(self, n: int) -> tuple[int, int]:
        step = require_step(n)
        return (self.a1 + step * self.b1, self.a2 + step * self.b2)

    def is_hit(self, guess: object, n: int) -> bool:
        if not isinstance(guess, Sequence) or len(guess) != 2:
            raise ValidationError({"guess": "Lattice guesses are integer pairs."})
        point = (as_integer(guess[0], "guess"), as_integer(guess[1], "guess"))
        return point == self.position(n)

    def positions(self, steps: np.ndarray) -> np.ndarray:
        """Positions as an ``(len(steps), 2)`` int64 array."""

        steps = _as_steps(steps)
        if not steps.size:
            return np.empty((0, 2), dtype=np.int64)
        horizon = int(steps.max())
        _require_int64((self.a1, self.b1), horizon)
        _require_int64((self.a2, self.b2), horizon)
        return np.stack(
            (self.a1 + steps * self.b1, self.a2 + steps * self.b2), axis=-1
        )

    def matches(self, steps: np.ndarray, guesses: np.ndarray) -> np.ndarray:
        try:
            return np.all(self.positions(steps) == guesses, axis=-1)
        except OverflowError:
            return np.fromiter(
                (
                    self.is_hit((int(g[0]), int(g[1])), int(n))
                    for n, g in zip(steps, guesses, strict=True)
                ),
                dtype=bool,
                count=len(steps),
            )


LineRabbit = LinearRabbit | PolynomialRabbit | RealLinearRabbit
AnyRabbit = LineRabbit | LatticeRabbit2D
