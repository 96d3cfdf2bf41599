"""Envelope functions ``h`` bounding the probabilistic hunter's guesses.

Floors of transcendental products are evaluated in float64 and re-derived in
high precision whenever the float lands within a few dozen ulps of an
integer, so scalar and vectorized evaluations always agree.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial

import mpmath
import numpy as np
from django.core.exceptions import ValidationError

from .rabbits import as_integer, require_step

logger = logging.getLogger(__name__)

_EXACT_DPS = 50
_GUARD_ULPS = 64


class DivergenceClass(enum.StrEnum):
    """Behaviour of ``sum 1/h(k)`` as recorded in the registry."""

    DIVERGES = "diverges"
    CONVERGES = "converges"
    UNKNOWN = "unknown"


class Basis(enum.StrEnum):
    STRUCTURAL = "structural"
    HEURISTIC = "heuristic"


def _near_integer(approx: np.ndarray) -> np.ndarray:
    frac = approx - np.floor(approx)
    slack = _GUARD_ULPS * np.finfo(np.float64).eps * np.maximum(np.abs(approx), 1.0)
    return (frac < slack) | (1.0 - frac < slack)


def _guarded_floor(
    approx: np.ndarray, steps: np.ndarray, exact: Callable[[int], int]
) -> np.ndarray:
    result = np.floor(approx).astype(np.int64)
    for i in np.flatnonzero(_near_integer(approx)):
        result[i] = exact(int(steps[i]))
    return result


def _steps(steps: np.ndarray) -> np.ndarray:
    steps = np.asarray(steps, dtype=np.int64)
    if steps.size and steps.min() < 1:
        raise ValidationError({"n": "Time steps start at 1."})
    return steps


def _klogk_exact(n: int) -> int:
    with mpmath.workdps(_EXACT_DPS):
        return int(mpmath.floor(n * mpmath.log(n)))


def _xloglog_exact(n: int) -> int:
    with mpmath.workdps(_EXACT_DPS):
        return max(int(mpmath.floor(n * mpmath.log(mpmath.log(n + 1)))), 0)


def klogk_values(steps: np.ndarray) -> np.ndarray:
    """Vectorized ``floor(n ln n)``."""

    n = _steps(steps)
    real = n.astype(np.float64)
    return _guarded_floor(real * np.log(real), n, _klogk_exact)


def xloglog_values(steps: np.ndarray) -> np.ndarray:
    """Vectorized ``floor(n ln ln(n + 1))`` clamped below at zero."""

    n = _steps(steps)
    real = n.astype(np.float64)
    floored = _guarded_floor(real * np.log(np.log(real + 1.0)), n, _xloglog_exact)
    return np.maximum(floored, 0)


def h_eval_klogk(n: int) -> int:
    """``floor(n ln n)`` for a single step; ``h(1) = 0``."""

    return int(klogk_values(np.array([require_step(n)]))[0])


def h_eval_loglog(n: int) -> int:
    """``floor(n ln ln(n + 1))`` for a single step, never negative."""

    return int(xloglog_values(np.array([require_step(n)]))[0])


def _power_values(steps: np.ndarray, exponent: int) -> np.ndarray:
    return _steps(steps) ** exponent


def _k15_scalar(n: int) -> int:
    return math.isqrt(n**3)


def _k15_values(steps: np.ndarray) -> np.ndarray:
    n = _steps(steps)
    cubes = n.astype(np.float64) ** 3
    approx = np.floor(np.sqrt(cubes)).astype(np.int64)
    # Correct the float root by at most one in either direction.
    approx -= (approx * approx > n**3).astype(np.int64)
    approx += ((approx + 1) * (approx + 1) <= n**3).astype(np.int64)
    return approx


def _klogk_smooth(steps: np.ndarray) -> np.ndarray:
    real = _steps(steps).astype(np.float64)
    return real * np.log(real)


def _xloglog_smooth(steps: np.ndarray) -> np.ndarray:
    real = _steps(steps).astype(np.float64)
    return real * np.log(np.log(real + 1.0))


def _k15_smooth(steps: np.ndarray) -> np.ndarray:
    return _steps(steps).astype(np.float64) ** 1.5


@dataclass(frozen=True)
class HFunction:
    """An envelope ``h: N+ -> N`` with registry metadata.

    ``dominates_affine`` records whether ``h(k) > A + Bk`` eventually holds for
    every affine trajectory (``None`` when only finite evidence exists).
    ``smooth`` is the unfloored real-valued companion used by series bounds.
    """

    name: str
    scalar: Callable[[int], int]
    divergence_class: DivergenceClass = DivergenceClass.UNKNOWN
    dominates_affine: bool | None = None
    vector: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False
    )
    smooth: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False
    )
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "divergence_class", DivergenceClass(self.divergence_class)
        )

    def __call__(self, n: int) -> int:
        value = as_integer(self.scalar(require_step(n)), "h")
        if value < 0:
            raise ValidationError({"h": f"Envelope '{self.name}' went negative."})
        return value

    def values(self, steps: np.ndarray) -> np.ndarray:
        """``h`` over an array of steps as int64."""

        steps = _steps(steps)
        if self.vector is not None:
            return np.asarray(self.vector(steps), dtype=np.int64)
        return np.fromiter(
            (self(int(n)) for n in steps), dtype=np.int64, count=len(steps)
        )


KLOGK = HFunction(
    name="klogk",
    scalar=h_eval_klogk,
    vector=klogk_values,
    smooth=_klogk_smooth,
    divergence_class=DivergenceClass.DIVERGES,
    dominates_affine=True,
    description="floor(k ln k)",
)
XLOGLOG = HFunction(
    name="xloglog",
    scalar=h_eval_loglog,
    vector=xloglog_values,
    smooth=_xloglog_smooth,
    divergence_class=DivergenceClass.DIVERGES,
    dominates_affine=True,
    description="floor(k ln ln(k + 1)), clamped at 0",
)
K15 = HFunction(
    name="k15",
    scalar=_k15_scalar,
    vector=_k15_values,
    smooth=_k15_smooth,
    divergence_class=DivergenceClass.CONVERGES,
    dominates_affine=True,
    description="floor(k^1.5)",
)
K2 = HFunction(
    name="k2",
    scalar=partial(pow, exp=2),
    vector=partial(_power_values, exponent=2),
    divergence_class=DivergenceClass.CONVERGES,
    dominates_affine=True,
    description="k^2",
)
IDENTITY = HFunction(
    name="k",
    scalar=int,
    vector=partial(_power_values, exponent=1),
    divergence_class=DivergenceClass.DIVERGES,
    dominates_affine=False,
    description="k",
)

_REGISTRY: dict[str, HFunction] = {
    h.name: h for h in (KLOGK, XLOGLOG, K15, K2, IDENTITY)
}


def get_envelope(name: str) -> HFunction:
    try:
        return _REGISTRY[name]
    except KeyError as exc:
        known = ", ".join(sorted(_REGISTRY))
        raise ValidationError(
            {"envelope": f"Unknown envelope '{name}'; registered: {known}."}
        ) from exc


def register_envelope(h: HFunction, *, replace: bool = False) -> HFunction:
    """Add a user envelope; divergence stays ``unknown`` unless stated."""

    if h.name in _REGISTRY and not replace:
        raise ValidationError({"envelope": f"Envelope '{h.name}' already exists."})
    _REGISTRY[h.name] = h
    logger.debug("Registered envelope %s (%s)", h.name, h.divergence_class)
    return h


def unregister_envelope(name: str) -> None:
    _REGISTRY.pop(name, None)


def registered_envelopes() -> list[HFunction]:
    return [_REGISTRY[name] for name in sorted(_REGISTRY)]


@dataclass(frozen=True)
class EnvelopeReport:
    """Finite-range evidence for the three hunting-envelope conditions."""

    name: str
    horizon: int
    monotone: bool
    first_decrease: int | None
    grows: bool
    superlinear_evidence: bool
    superlinear: bool
    superlinear_basis: Basis
    growth_ratios: tuple[tuple[int, float], ...]
    divergence_class: DivergenceClass
    reciprocal_sums: tuple[tuple[int, float], ...]

    @property
    def valid(self) -> bool:
        return self.monotone

    @property
    def accepted(self) -> bool:
        return (
            self.valid
            and self.superlinear
            and self.divergence_class is DivergenceClass.DIVERGES
        )


def _checkpoints(horizon: int) -> list[int]:
    marks = [10**e for e in range(1, len(str(horizon))) if 10**e <= horizon]
    if not marks or marks[-1] != horizon:
        marks.append(horizon)
    return marks


def validate_h(h: HFunction, horizon: int) -> EnvelopeReport:
    """Check monotonicity, superlinear growth and echo the divergence class."""

    horizon = as_integer(horizon, "horizon")
    if horizon < 10:
        raise ValidationError({"horizon": "Validation needs a horizon of at least 10."})

    steps = np.arange(1, horizon + 1, dtype=np.int64)
    values = h.values(steps)
    drops = np.flatnonzero(np.diff(values) < 0)
    first_decrease = int(drops[0]) + 2 if drops.size else None

    # Condition (2) cannot be decided from finite data: look for h(2^j)/2^j
    # increasing strictly over the upper half of the sampled octaves.
    octaves = range(1, horizon.bit_length())
    ratios = tuple((j, int(values[2**j - 1]) / 2**j) for j in octaves)
    tail = [ratio for j, ratio in ratios if j >= (len(ratios) + 1) // 2]
    evidence = len(tail) >= 2 and all(b > a for a, b in zip(tail, tail[1:]))

    if h.dominates_affine is None:
        superlinear, basis = evidence, Basis.HEURISTIC
    else:
        superlinear, basis = h.dominates_affine, Basis.STRUCTURAL

    reciprocals = np.cumsum(1.0 / np.maximum(values, 1))
    sums = tuple((m, float(reciprocals[m - 1])) for m in _checkpoints(horizon))

    report = EnvelopeReport(
        name=h.name,
        horizon=horizon,
        monotone=first_decrease is None,
        first_decrease=first_decrease,
        grows=bool(values[-1] > values[0]),
        superlinear_evidence=evidence,
        superlinear=superlinear,
        superlinear_basis=basis,
        growth_ratios=ratios,
        divergence_class=h.divergence_class,
        reciprocal_sums=sums,
    )
    logger.info(
        "Validated envelope %s to %d: monotone=%s superlinear=%s class=%s",
        h.name,
        horizon,
        report.monotone,
        report.superlinear,
        report.divergence_class,
    )
    return report
