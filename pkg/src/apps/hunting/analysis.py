"""Closed-form side of the hunt: hit probabilities, survival and series checks.

Everything here is pure and works on 64-bit floats except :func:`raabe_rho`,
which stays rational because the envelope values are integers.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from django.core.exceptions import ValidationError

from .envelopes import KLOGK, HFunction, get_envelope, validate_h
from .rabbits import AnyRabbit, as_integer, require_step

logger = logging.getLogger(__name__)

SANDWICH_SLACK = 1e-6


def _require_line(rabbit: AnyRabbit) -> None:
    if getattr(rabbit, "target", "line") != "line":
        raise ValidationError(
            {"rabbit": "Envelope probabilities are defined on the integer line."}
        )


def _horizon(value: object, field: str = "horizon", minimum: int = 1) -> int:
    horizon = as_integer(value, field)
    if horizon < minimum:
        raise ValidationError({field: f"Must be at least {minimum}."})
    return horizon


def step_hit_prob(rabbit: AnyRabbit, h: HFunction, n: int) -> float:
    """Probability that the uniform guess on ``{-h(n)..h(n)}`` strikes the rabbit."""

    _require_line(rabbit)
    radius = h(require_step(n))
    return rabbit.hit_count(n, radius) / (2 * radius + 1)


def hit_probabilities(rabbit: AnyRabbit, h: HFunction, horizon: int) -> np.ndarray:
    """``p_n`` for ``n = 1..horizon``."""

    _require_line(rabbit)
    steps = np.arange(1, _horizon(horizon) + 1, dtype=np.int64)
    radii = h.values(steps)
    return rabbit.hit_counts(steps, radii) / (2 * radii + 1)


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """``S(k) = P(T > k)`` for ``k = 1..horizon``; ``S(0) = 1`` is implicit."""

    p_values: np.ndarray
    s_values: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.s_values)

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, self.horizon + 1, dtype=np.int64)

    def at(self, k: int) -> float:
        k = as_integer(k, "k")
        if k == 0:
            return 1.0
        if not 1 <= k <= self.horizon:
            raise ValidationError({"k": f"Outside 0..{self.horizon}."})
        return float(self.s_values[k - 1])

    def truncate(self, horizon: int) -> SurvivalCurve:
        horizon = _horizon(horizon)
        if horizon > self.horizon:
            raise ValidationError({"horizon": "Cannot extend a survival curve."})
        return SurvivalCurve(self.p_values[:horizon], self.s_values[:horizon])


def survival_from_probabilities(p_values: np.ndarray) -> SurvivalCurve:
    """Accumulate ``log(1 - p_n)``; ``S`` is exactly 0 from the first ``p_n = 1``."""

    p = np.asarray(p_values, dtype=np.float64)
    if p.size and (p.min() < 0 or p.max() > 1):
        raise ValidationError({"p_values": "Probabilities must lie in [0, 1]."})
    with np.errstate(divide="ignore"):
        s = np.exp(np.cumsum(np.log1p(-p)))
    return SurvivalCurve(p_values=p, s_values=s)


def analytic_survival(rabbit: AnyRabbit, h: HFunction, horizon: int) -> SurvivalCurve:
    curve = survival_from_probabilities(hit_probabilities(rabbit, h, horizon))
    logger.debug(
        "Survival of %s under %s to %d: S=%r",
        rabbit.spec,
        h.name,
        curve.horizon,
        curve.at(curve.horizon),
    )
    return curve


def deterministic_survival(hit_step: int | None, horizon: int) -> SurvivalCurve:
    """Step-function survival of a hunt that first hits at ``hit_step``."""

    p = np.zeros(_horizon(horizon), dtype=np.float64)
    if hit_step is not None and 1 <= hit_step <= len(p):
        p[hit_step - 1] = 1.0
    return survival_from_probabilities(p)


def truncated_mean(curve: SurvivalCurve) -> float:
    """``sum_{k=0}^{K-1} S(k)`` with ``S(0) = 1``, i.e. ``E[min(T, K)]``."""

    return 1.0 + math.fsum(curve.s_values[:-1])


def truncated_means(
    curve: SurvivalCurve, horizons: Iterable[int]
) -> list[tuple[int, float]]:
    return [(k, truncated_mean(curve.truncate(k))) for k in horizons]


def raabe_rho(n: int, h: HFunction) -> Fraction:
    """``n / (2 h(n + 1) - 1)``, the Raabe ratio of ``c_n = prod 2h/(2h+1)``."""

    n = require_step(n)
    denominator = 2 * h(n + 1) - 1
    if denominator <= 0:
        raise ValidationError(
            {"n": f"Raabe ratio undefined at n={n}: 2h(n+1) - 1 = {denominator}."}
        )
    return Fraction(n, denominator)


def raabe_profile(h: HFunction, start: int, stop: int) -> np.ndarray:
    """``float(raabe_rho(n))`` for ``n = start..stop``."""

    start = require_step(start, "start")
    stop = _horizon(stop, "stop", minimum=start)
    steps = np.arange(start, stop + 1, dtype=np.int64)
    denominators = 2 * h.values(steps + 1) - 1
    if denominators.min() <= 0:
        bad = int(steps[np.argmax(denominators <= 0)])
        raise ValidationError({"start": f"Raabe ratio undefined at n={bad}."})
    return steps / denominators


@dataclass(frozen=True, eq=False)
class PartialSums:
    """Partial sums ``sum_{k=2}^{m} 1/max(h(k), 1)`` for ``m = 2..horizon``.

    ``companion`` holds the same sums over the unfloored envelope when the
    envelope defines one.
    """

    name: str
    floored: np.ndarray
    companion: np.ndarray | None

    @property
    def horizon(self) -> int:
        return len(self.floored) + 1

    def at(self, m: int) -> float:
        return float(self.floored[_index(m, self.horizon)])

    def companion_at(self, m: int) -> float:
        if self.companion is None:
            raise ValidationError({"h": f"Envelope '{self.name}' has no companion."})
        return float(self.companion[_index(m, self.horizon)])


def _index(m: int, horizon: int) -> int:
    m = as_integer(m, "m")
    if not 2 <= m <= horizon:
        raise ValidationError({"m": f"Partial sums cover m = 2..{horizon}."})
    return m - 2


def reciprocal_partial_sums(h: HFunction, horizon: int) -> PartialSums:
    steps = np.arange(2, _horizon(horizon, minimum=2) + 1, dtype=np.int64)
    floored = np.cumsum(1.0 / np.maximum(h.values(steps), 1))
    companion = None
    if h.smooth is not None:
        companion = np.cumsum(1.0 / h.smooth(steps))
    return PartialSums(name=h.name, floored=floored, companion=companion)


@dataclass(frozen=True)
class SandwichRow:
    m: int
    lower: float
    floored: float
    companion: float
    upper: float

    @property
    def passes(self) -> bool:
        return (
            self.floored >= self.lower - SANDWICH_SLACK
            and self.lower - SANDWICH_SLACK <= self.companion
            and self.companion <= self.upper + SANDWICH_SLACK
        )


def integral_test_sandwich(
    sums: PartialSums, checkpoints: Sequence[int] | None = None
) -> list[SandwichRow]:
    """Integral-test bounds for ``sum 1/(k ln k)``.

    ``ln ln(m+1) - ln ln 2 <= sum <= 1/(2 ln 2) + ln ln m - ln ln 2``. The
    floored sums only have to clear the lower bound.
    """

    if sums.companion is None:
        raise ValidationError({"h": f"Envelope '{sums.name}' has no companion."})
    if checkpoints is None:
        checkpoints = [10**e for e in range(2, 7) if 10**e <= sums.horizon]
    base = math.log(math.log(2))
    rows = []
    for m in checkpoints:
        rows.append(
            SandwichRow(
                m=m,
                lower=math.log(math.log(m + 1)) - base,
                floored=sums.at(m),
                companion=sums.companion_at(m),
                upper=1 / (2 * math.log(2)) + math.log(math.log(m)) - base,
            )
        )
    return rows


@dataclass(frozen=True)
class LogSeriesReport:
    """Paired partial sums of ``a_k`` and ``log(1 + a_k)``."""

    terms: int
    linear_sum: float
    log_sum: float

    @property
    def ratio(self) -> float | None:
        if self.linear_sum == 0:
            return None
        return self.log_sum / self.linear_sum


def log_series_equivalence_check(
    terms: Sequence[float] | np.ndarray,
) -> LogSeriesReport:
    a = np.asarray(terms, dtype=np.float64)
    if a.size and (a.min() < 0 or not np.all(np.isfinite(a))):
        raise ValidationError({"terms": "Terms must be finite and non-negative."})
    return LogSeriesReport(
        terms=len(a),
        linear_sum=math.fsum(a),
        log_sum=math.fsum(np.log1p(a)),
    )


def envelope_miss_terms(h: HFunction, horizon: int) -> np.ndarray:
    """``a_k = 1/(2 h(k))`` for ``k = 2..horizon``."""

    steps = np.arange(2, _horizon(horizon, minimum=2) + 1, dtype=np.int64)
    return 1.0 / (2.0 * np.maximum(h.values(steps), 1))


def containment_loss_step(
    rabbit: AnyRabbit, h: HFunction, horizon: int
) -> int | None:
    """Smallest ``N`` with the rabbit outside the envelope on ``[N, horizon]``."""

    _require_line(rabbit)
    steps = np.arange(1, _horizon(horizon) + 1, dtype=np.int64)
    contained = np.flatnonzero(rabbit.hit_counts(steps, h.values(steps)) > 0)
    if not contained.size:
        return 1
    last = int(contained[-1]) + 1
    return None if last == len(steps) else last + 1


def envelope_validation(name: str, horizon: int) -> dict[str, object]:
    """``validate_h`` report plus the integral-test sandwich for ``klogk``."""

    h = get_envelope(name)
    report = validate_h(h, horizon)
    sandwich = None
    if h.name == KLOGK.name:
        sandwich = integral_test_sandwich(reciprocal_partial_sums(h, horizon))
    return {
        "report": report,
        "sandwich": sandwich,
        "sandwich_passes": (
            None if sandwich is None else all(row.passes for row in sandwich)
        ),
    }
