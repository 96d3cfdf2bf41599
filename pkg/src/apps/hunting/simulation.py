"""Hunt loops and Monte Carlo batches.

Hunts are evaluated block by block: the hunter produces a block of guesses,
the rabbit answers with a hit mask, and the first ``True`` ends the hunt.
Nothing is precomputed beyond the current block.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from .analysis import SurvivalCurve
from .rabbits import AnyRabbit, as_integer
from .strategies import (
    DiagonalHunter,
    Hunter,
    ProbabilisticHunter,
    StrategySpec,
    derive_trial_seed,
    require_seed,
)

logger = logging.getLogger(__name__)

DIAGONAL_BLOCK_SIZE = 4096
AGREEMENT_SIGMAS = 3.0
AGREEMENT_FLOOR = 0.99

Guess = int | tuple[int, int]


@dataclass(frozen=True)
class HuntOutcome:
    """First hit of a hunt, or censoring at the cutoff."""

    hit: bool
    step: int | None
    censored_at: int | None
    guesses_count: int
    hit_guess: Guess | None = None
    guesses: tuple[Guess, ...] | None = field(default=None, repr=False)

    @classmethod
    def struck(
        cls, step: int, guess: Guess, guesses: tuple[Guess, ...] | None = None
    ) -> HuntOutcome:
        return cls(True, step, None, step, guess, guesses)

    @classmethod
    def censored(
        cls, cutoff: int, guesses: tuple[Guess, ...] | None = None
    ) -> HuntOutcome:
        return cls(False, None, cutoff, cutoff, None, guesses)


def _require_cutoff(cutoff: object) -> int:
    value = as_integer(cutoff, "cutoff")
    if value < 1:
        raise ValidationError({"cutoff": "Cutoff must be at least 1."})
    return value


def _as_guess(value: object) -> Guess:
    if isinstance(value, np.ndarray):
        return (int(value[0]), int(value[1]))
    return int(value)  # type: ignore[call-overload]


def _pursue_exact(
    rabbit: AnyRabbit,
    hunter: DiagonalHunter,
    start: int,
    cutoff: int,
    trace: list | None,
) -> HuntOutcome | None:
    for k in range(start, cutoff + 1):
        guess = hunter.guess(k)
        if trace is not None:
            trace.append(guess)
        if rabbit.is_hit(guess, k):
            return HuntOutcome.struck(k, guess, _freeze(trace))
    return None


def _freeze(trace: list | None) -> tuple[Guess, ...] | None:
    return None if trace is None else tuple(trace)


def _pursue_diagonal(
    rabbit: AnyRabbit, hunter: DiagonalHunter, cutoff: int, trace: list | None
) -> HuntOutcome:
    for start in range(1, cutoff + 1, DIAGONAL_BLOCK_SIZE):
        steps = np.arange(start, min(start + DIAGONAL_BLOCK_SIZE, cutoff + 1))
        try:
            guesses = hunter.guess_array(steps)
        except OverflowError:
            logger.debug("Diagonal guesses left int64 at step %d; going exact", start)
            outcome = _pursue_exact(rabbit, hunter, start, cutoff, trace)
            return outcome or HuntOutcome.censored(cutoff, _freeze(trace))
        mask = rabbit.matches(steps, guesses)
        hits = np.flatnonzero(mask)
        if hits.size:
            i = int(hits[0])
            if trace is not None:
                trace.extend(_as_guess(g) for g in guesses[: i + 1])
            return HuntOutcome.struck(
                int(steps[i]), _as_guess(guesses[i]), _freeze(trace)
            )
        if trace is not None:
            trace.extend(_as_guess(g) for g in guesses)
    return HuntOutcome.censored(cutoff, _freeze(trace))


def _pursue_probabilistic(
    rabbit: AnyRabbit, hunter: ProbabilisticHunter, cutoff: int, trace: list | None
) -> HuntOutcome:
    hunter.reset()
    while True:
        steps, _, guesses = hunter.next_block()
        if steps[0] > cutoff:
            break
        keep = steps <= cutoff
        steps, guesses = steps[keep], guesses[keep]
        hits = np.flatnonzero(rabbit.matches(steps, guesses))
        if hits.size:
            i = int(hits[0])
            if trace is not None:
                trace.extend(int(g) for g in guesses[: i + 1])
            return HuntOutcome.struck(int(steps[i]), int(guesses[i]), _freeze(trace))
        if trace is not None:
            trace.extend(int(g) for g in guesses)
    return HuntOutcome.censored(cutoff, _freeze(trace))


def run_hunt(
    rabbit: AnyRabbit,
    strategy: StrategySpec | Hunter,
    cutoff: int,
    seed: int | None = None,
    *,
    trace: bool = False,
) -> HuntOutcome:
    """Hunt ``rabbit`` for at most ``cutoff`` steps and report the first hit."""

    cutoff = _require_cutoff(cutoff)
    if isinstance(strategy, StrategySpec):
        strategy.check_pairing(rabbit)
        hunter = strategy.build(seed)
    else:
        hunter = strategy
    guesses: list | None = [] if trace else None
    if isinstance(hunter, ProbabilisticHunter):
        return _pursue_probabilistic(rabbit, hunter, cutoff, guesses)
    return _pursue_diagonal(rabbit, hunter, cutoff, guesses)


def sweep_diagonal(
    hunter: DiagonalHunter, rabbits: Iterable[AnyRabbit], cutoff: int
) -> list[HuntOutcome]:
    """Run one diagonal guess stream against many rabbits.

    The guesses for ``1..cutoff`` are computed once; each rabbit is then
    checked only up to its capture step.
    """

    cutoff = _require_cutoff(cutoff)
    steps = np.arange(1, cutoff + 1, dtype=np.int64)
    try:
        guesses = hunter.guess_array(steps)
    except OverflowError:
        return [run_hunt(rabbit, hunter, cutoff) for rabbit in rabbits]

    outcomes = []
    for rabbit in rabbits:
        limit = min(cutoff, hunter.capture_step(rabbit))
        hits = np.flatnonzero(rabbit.matches(steps[:limit], guesses[:limit]))
        if hits.size:
            i = int(hits[0])
            outcomes.append(HuntOutcome.struck(i + 1, _as_guess(guesses[i])))
        else:
            outcomes.append(HuntOutcome.censored(cutoff))
    return outcomes


@dataclass(frozen=True)
class HuntConfig:
    rabbit: AnyRabbit
    strategy: StrategySpec
    cutoff: int
    master_seed: int
    trials: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "cutoff", _require_cutoff(self.cutoff))
        object.__setattr__(self, "master_seed", require_seed(self.master_seed, "seed"))
        trials = as_integer(self.trials, "trials")
        if trials < 1:
            raise ValidationError({"trials": "At least one trial is required."})
        object.__setattr__(self, "trials", trials)
        self.strategy.check_pairing(self.rabbit)

    def trial_seed(self, index: int) -> int:
        return derive_trial_seed(self.master_seed, index)


@dataclass(frozen=True, eq=False)
class TrialBatchResult:
    """Aggregated hitting times of a batch; ``trial_steps`` uses 0 for censored."""

    master_seed: int
    cutoff: int
    trial_steps: np.ndarray

    @property
    def trials(self) -> int:
        return len(self.trial_steps)

    @property
    def hit_steps(self) -> np.ndarray:
        return np.sort(self.trial_steps[self.trial_steps > 0])

    @property
    def censored_count(self) -> int:
        return int(np.count_nonzero(self.trial_steps == 0))

    @property
    def hit_fraction(self) -> float:
        return 1 - self.censored_count / self.trials

    @property
    def survival(self) -> np.ndarray:
        """Empirical ``S(k)`` for ``k = 1..cutoff``."""

        hits = np.bincount(self.hit_steps, minlength=self.cutoff + 1)[1:]
        return 1.0 - np.cumsum(hits) / self.trials

    def same_as(self, other: TrialBatchResult) -> bool:
        return (
            self.master_seed == other.master_seed
            and self.cutoff == other.cutoff
            and np.array_equal(self.trial_steps, other.trial_steps)
        )


def _run_chunk(config: HuntConfig, indices: Sequence[int]) -> list[tuple[int, int]]:
    results = []
    for i in indices:
        seed = config.trial_seed(i) if config.strategy.seeded else None
        outcome = run_hunt(config.rabbit, config.strategy, config.cutoff, seed)
        results.append((i, outcome.step or 0))
    return results


def _chunks(trials: int, workers: int) -> list[range]:
    size = max(1, math.ceil(trials / (workers * 4)))
    return [range(i, min(i + size, trials)) for i in range(0, trials, size)]


def run_trials(config: HuntConfig, *, workers: int | None = None) -> TrialBatchResult:
    """Run ``config.trials`` hunts with per-trial seeds.

    Trial ``i`` always uses ``derive_trial_seed(master_seed, i)``, so the
    result does not depend on ``workers``.
    """

    workers = 1 if workers is None else as_integer(workers, "workers")
    if workers < 1:
        raise ValidationError({"workers": "At least one worker is required."})
    logger.info(
        "Running %d trials of %s vs %s (cutoff=%d, seed=%d, workers=%d)",
        config.trials,
        config.rabbit.spec,
        config.strategy.spec,
        config.cutoff,
        config.master_seed,
        workers,
    )
    chunks = _chunks(config.trials, workers)
    if workers == 1:
        pairs = [pair for chunk in chunks for pair in _run_chunk(config, chunk)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, config, chunk) for chunk in chunks]
            pairs = [pair for future in futures for pair in future.result()]

    trial_steps = np.zeros(config.trials, dtype=np.int64)
    for i, step in sorted(pairs):
        trial_steps[i] = step
    result = TrialBatchResult(config.master_seed, config.cutoff, trial_steps)
    logger.info(
        "Batch done: %d hits, %d censored",
        result.trials - result.censored_count,
        result.censored_count,
    )
    return result


@dataclass(frozen=True)
class MeanExcess:
    """Sample mean of ``min(T, horizon)`` with its standard error."""

    horizon: int
    mean: float
    stderr: float


def empirical_mean_excess(
    result: TrialBatchResult, horizons: Iterable[int]
) -> list[MeanExcess]:
    # Censored trials have T > cutoff >= horizon.
    capped = np.where(result.trial_steps == 0, result.cutoff + 1, result.trial_steps)
    means = []
    for horizon in horizons:
        horizon = _require_cutoff(horizon)
        if horizon > result.cutoff:
            raise ValidationError(
                {"horizons": f"Horizon {horizon} exceeds the cutoff {result.cutoff}."}
            )
        values = np.minimum(capped, horizon).astype(np.float64)
        stderr = 0.0
        if len(values) > 1:
            stderr = float(values.std(ddof=1) / math.sqrt(len(values)))
        means.append(MeanExcess(horizon, float(values.mean()), stderr))
    return means


@dataclass(frozen=True)
class AgreementReport:
    """Pointwise ``|S_emp - S| <= 3 sigma`` agreement over sampled steps."""

    sampled: int
    passing: int
    hit_fraction: float
    expected_hit_fraction: float
    hit_fraction_stderr: float

    @property
    def fraction(self) -> float:
        return self.passing / self.sampled if self.sampled else 1.0

    @property
    def hit_fraction_agrees(self) -> bool:
        gap = abs(self.hit_fraction - self.expected_hit_fraction)
        return gap <= AGREEMENT_SIGMAS * self.hit_fraction_stderr + 1e-12

    @property
    def passes(self) -> bool:
        return self.fraction >= AGREEMENT_FLOOR and self.hit_fraction_agrees


def survival_agreement(
    result: TrialBatchResult, curve: SurvivalCurve, sample_every: int = 10
) -> AgreementReport:
    sample_every = as_integer(sample_every, "sample_every")
    if sample_every < 1:
        raise ValidationError({"sample_every": "Sample spacing must be at least 1."})
    if curve.horizon < result.cutoff:
        raise ValidationError({"curve": "Analytic curve is shorter than the batch."})
    ks = np.arange(sample_every, result.cutoff + 1, sample_every)
    analytic = curve.s_values[ks - 1]
    empirical = result.survival[ks - 1]
    sigma = np.sqrt(analytic * (1 - analytic) / result.trials)
    passing = np.abs(empirical - analytic) <= AGREEMENT_SIGMAS * sigma + 1e-12

    final = curve.at(result.cutoff)
    return AgreementReport(
        sampled=len(ks),
        passing=int(np.count_nonzero(passing)),
        hit_fraction=result.hit_fraction,
        expected_hit_fraction=1 - final,
        hit_fraction_stderr=math.sqrt(final * (1 - final) / result.trials),
    )
