"""Hunter strategies: guess ``X_n`` at every step of a hunt."""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from numpy.random import PCG64, Generator, SeedSequence

from .enumeration import Enumeration, snake_forward_many
from .envelopes import HFunction, get_envelope
from .rabbits import (
    AnyRabbit,
    LatticeRabbit2D,
    LinearRabbit,
    PolynomialRabbit,
    as_integer,
    require_step,
)

logger = logging.getLogger(__name__)

SEED_MAX = 2**64 - 1
STREAM_BLOCK_SIZE = 1024

# Largest step for which the planar diagonal guess a + b*k fits in int64.
_PLANAR_INT64_STEPS = 2**40


class StrategyKind(enum.StrEnum):
    DIAGONAL = "diagonal"
    PROBABILISTIC = "probabilistic"


class Family(enum.StrEnum):
    """What a diagonal hunter's parameter tuples describe."""

    POLYNOMIAL = "polynomial"
    LATTICE = "lattice"


def require_seed(seed: object, field_name: str = "seed") -> int:
    """Return ``seed`` as an unsigned 64-bit integer."""

    value = as_integer(seed, field_name)
    if not 0 <= value <= SEED_MAX:
        raise ValidationError({field_name: "Seeds are unsigned 64-bit integers."})
    return value


def fresh_seed() -> int:
    """Draw a master seed from OS entropy."""

    return int(SeedSequence().generate_state(1, np.uint64)[0])


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed of trial ``trial_index`` under ``master_seed``.

    The first 64-bit word of ``SeedSequence(master_seed, spawn_key=(i,))``;
    independent of how trials are scheduled.
    """

    master = require_seed(master_seed, "master_seed")
    index = as_integer(trial_index, "trial_index")
    if index < 0:
        raise ValidationError({"trial_index": "Trial indices start at 0."})
    sequence = SeedSequence(master, spawn_key=(index,))
    return int(sequence.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class DiagonalHunter:
    """Guess the step-``k`` position of the ``k``-th enumerated parameter tuple.

    Tuples are read in ascending degree: ``(A, B)`` for lines, ``(A, B, C)``
    for quadratics, ``(a1, a2, b1, b2)`` for planar lattice walks.
    """

    dimension: int = 2
    family: Family = field(init=False)
    enumeration: Enumeration = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        enumeration = Enumeration(self.dimension)
        object.__setattr__(self, "dimension", enumeration.dimension)
        object.__setattr__(self, "enumeration", enumeration)
        family = Family.LATTICE if enumeration.dimension == 4 else Family.POLYNOMIAL
        object.__setattr__(self, "family", family)

    @property
    def target(self) -> str:
        return "lattice" if self.family is Family.LATTICE else "line"

    @property
    def spec(self) -> str:
        if self.dimension == 2:
            return "diagonal:snake"
        return f"diagonal:d{self.dimension}"

    def parameters(self, k: int) -> tuple[int, ...]:
        return self.enumeration.forward(k)

    def guess(self, k: int) -> int | tuple[int, int]:
        k = require_step(k, "k")
        params = self.parameters(k)
        if self.family is Family.LATTICE:
            a1, a2, b1, b2 = params
            return (a1 + k * b1, a2 + k * b2)
        return sum(c * k**i for i, c in enumerate(params))

    def guess_array(self, steps: np.ndarray) -> np.ndarray:
        """Guesses for a block of steps as int64 (``(K, 2)`` for lattices).

        Raises ``OverflowError`` when a guess leaves the int64 range.
        """

        steps = np.asarray(steps, dtype=np.int64)
        if steps.size and steps.min() < 1:
            raise ValidationError({"k": "Time steps start at 1."})
        if self.dimension == 2:
            if steps.size and steps.max() > _PLANAR_INT64_STEPS:
                raise OverflowError("diagonal guesses exceed the int64 range")
            a, b = snake_forward_many(steps)
            return a + b * steps
        guesses = [self.guess(int(k)) for k in steps]
        if self.family is Family.LATTICE:
            return np.array(guesses, dtype=np.int64).reshape(-1, 2)
        return np.array(guesses, dtype=np.int64)

    def tuple_for(self, rabbit: AnyRabbit) -> tuple[int, ...]:
        """The rabbit's parameters as a point of this hunter's enumeration."""

        if self.family is Family.LATTICE:
            if not isinstance(rabbit, LatticeRabbit2D):
                raise ValidationError(
                    {"rabbit": "The four-dimensional hunter tracks lattice rabbits."}
                )
            return rabbit.parameters
        if not isinstance(rabbit, LinearRabbit | PolynomialRabbit):
            raise ValidationError(
                {"rabbit": f"No parameter tuple covers a {rabbit.kind} rabbit."}
            )
        coefficients = list(rabbit.coefficients)
        while len(coefficients) > self.dimension and coefficients[-1] == 0:
            coefficients.pop()
        if len(coefficients) > self.dimension:
            raise ValidationError(
                {
                    "rabbit": f"Degree {len(coefficients) - 1} trajectories need "
                    f"a hunter of dimension {len(coefficients)}."
                }
            )
        coefficients += [0] * (self.dimension - len(coefficients))
        return tuple(coefficients)

    def capture_step(self, rabbit: AnyRabbit) -> int:
        """Step at which the diagonal guess is guaranteed to strike ``rabbit``."""

        return self.enumeration.inverse(self.tuple_for(rabbit))


class ProbabilisticHunter:
    """Guess uniformly on ``{-h(n), ..., h(n)}`` from a seeded PCG64 stream.

    Draws are made in consecutive blocks of ``block_size`` steps, so the guess
    sequence depends only on the seed. One instance owns mutable generator
    state and must stay on one thread.
    """

    target = "line"

    def __init__(
        self, envelope: HFunction, seed: int, *, block_size: int = STREAM_BLOCK_SIZE
    ) -> None:
        self.envelope = envelope
        self.seed = require_seed(seed)
        self.block_size = as_integer(block_size, "block_size")
        if self.block_size < 1:
            raise ValidationError({"block_size": "Block size must be positive."})
        self.reset()

    def __repr__(self) -> str:
        return f"ProbabilisticHunter(envelope={self.envelope.name!r}, seed={self.seed})"

    @property
    def spec(self) -> str:
        return f"{StrategyKind.PROBABILISTIC}:{self.envelope.name}"

    def reset(self) -> None:
        """Rewind the stream to step 1."""

        self._generator = Generator(PCG64(SeedSequence(self.seed)))
        self._start = 1 - self.block_size
        self._radii = np.empty(0, dtype=np.int64)
        self._guesses = np.empty(0, dtype=np.int64)

    def next_block(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Draw the next block; returns ``(steps, radii, guesses)``."""

        self._start += self.block_size
        steps = np.arange(self._start, self._start + self.block_size, dtype=np.int64)
        self._radii = self.envelope.values(steps)
        self._guesses = self._generator.integers(
            -self._radii, self._radii, endpoint=True, dtype=np.int64
        )
        return steps, self._radii, self._guesses

    def guess(self, n: int) -> int:
        """Guess at step ``n``; steps must be requested in non-decreasing order."""

        n = require_step(n)
        if n < self._start:
            raise ValidationError(
                {"n": f"Step {n} precedes the current block at {self._start}."}
            )
        while n >= self._start + self.block_size:
            self.next_block()
        return int(self._guesses[n - self._start])

    def radius(self, n: int) -> int:
        return self.envelope(n)


Hunter = DiagonalHunter | ProbabilisticHunter


@dataclass(frozen=True)
class StrategySpec:
    """A parsed ``kind:argument`` strategy description."""

    kind: StrategyKind
    envelope: str | None = None
    dimension: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.kind is StrategyKind.PROBABILISTIC:
            get_envelope(self.envelope or "")
        else:
            object.__setattr__(self, "dimension", Enumeration(self.dimension).dimension)

    @property
    def spec(self) -> str:
        if self.kind is StrategyKind.PROBABILISTIC:
            return f"{self.kind}:{self.envelope}"
        return DiagonalHunter(self.dimension).spec

    @property
    def seeded(self) -> bool:
        return self.kind is StrategyKind.PROBABILISTIC

    def h(self) -> HFunction:
        if self.envelope is None:
            raise ValidationError({"strategy": "Diagonal strategies have no envelope."})
        return get_envelope(self.envelope)

    def build(self, seed: int | None = None) -> Hunter:
        if self.kind is StrategyKind.DIAGONAL:
            return DiagonalHunter(self.dimension)
        if seed is None:
            raise ValidationError({"seed": "Probabilistic hunters need a seed."})
        return ProbabilisticHunter(self.h(), seed)

    def check_pairing(self, rabbit: AnyRabbit) -> None:
        """Reject hunters that cannot even aim at the rabbit's space."""

        target = getattr(rabbit, "target", "line")
        if self.kind is StrategyKind.PROBABILISTIC:
            if target != "line":
                raise ValidationError(
                    {"strategy": "Probabilistic hunters search the integer line."}
                )
            return
        expected = "lattice" if self.dimension == 4 else "line"
        if target != expected:
            raise ValidationError(
                {"strategy": f"{self.spec} cannot aim at a {rabbit.kind} rabbit."}
            )


def diagonal_guess(hunter: DiagonalHunter, k: int) -> int | tuple[int, int]:
    return hunter.guess(k)


def sample_guess(hunter: ProbabilisticHunter, n: int) -> int:
    return hunter.guess(n)


def guesses_in_support(
    radii: Sequence[int] | np.ndarray, guesses: Sequence[int] | np.ndarray
) -> bool:
    return bool(np.all(np.abs(np.asarray(guesses)) <= np.asarray(radii)))
