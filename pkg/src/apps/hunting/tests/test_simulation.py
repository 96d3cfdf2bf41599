"""Tests for hunts and Monte Carlo batches."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from django.core.exceptions import ValidationError
from numpy.random import PCG64, Generator

from apps.hunting.analysis import (
    analytic_survival,
    deterministic_survival,
    truncated_means,
)
from apps.hunting.enumeration import covering_bound, snake_inverse
from apps.hunting.envelopes import KLOGK
from apps.hunting.rabbits import (
    LatticeRabbit2D,
    LinearRabbit,
    PolynomialRabbit,
    RealLinearRabbit,
)
from apps.hunting.simulation import (
    HuntConfig,
    HuntOutcome,
    TrialBatchResult,
    empirical_mean_excess,
    run_hunt,
    run_trials,
    survival_agreement,
    sweep_diagonal,
)
from apps.hunting.strategies import (
    DiagonalHunter,
    ProbabilisticHunter,
    StrategySpec,
    derive_trial_seed,
)

DIAGONAL = StrategySpec("diagonal")
KLOGK_HUNTER = StrategySpec("probabilistic", envelope="klogk")


def assert_captured(hunter: DiagonalHunter, rabbits: list, outcomes: list) -> None:
    for rabbit, outcome in zip(rabbits, outcomes, strict=True):
        capture = hunter.capture_step(rabbit)
        assert outcome.hit, rabbit
        assert outcome.step <= capture, rabbit
        assert rabbit.is_hit(hunter.guess(capture), capture), rabbit


class TestRunHunt:
    @pytest.mark.parametrize(
        "rabbit, step",
        [((1, 1), 3), ((0, 1), 4), ((1, 0), 2), ((2, -1), 10), ((3, -1), 2)],
    )
    def test_diagonal_hits(self, rabbit: tuple[int, int], step: int) -> None:
        outcome = run_hunt(LinearRabbit(*rabbit), DIAGONAL, 100)

        assert outcome.hit
        assert outcome.step == step
        assert outcome.guesses_count == step
        assert outcome.censored_at is None

    def test_far_rabbit_is_hit_by_its_capture_step(self) -> None:
        rabbit = LinearRabbit(40, -7)
        capture = snake_inverse(40, -7)

        outcome = run_hunt(rabbit, DIAGONAL, capture)

        assert outcome.hit
        assert outcome.step <= capture

    def test_censored_before_capture(self) -> None:
        outcome = run_hunt(LinearRabbit(1, 1), DIAGONAL, 2)

        assert outcome == HuntOutcome.censored(2)
        assert outcome.step is None

    def test_trace_records_every_guess(self) -> None:
        outcome = run_hunt(LinearRabbit(0, 1), DIAGONAL, 10, trace=True)

        assert outcome.guesses == (0, 1, 4, 4)
        assert outcome.hit_guess == 4

    def test_origin_is_hit_at_step_one(self) -> None:
        for seed in (0, 1, 2**64 - 1):
            outcome = run_hunt(LinearRabbit(0, 0), KLOGK_HUNTER, 10, seed)
            assert outcome.step == 1

    def test_probabilistic_hunt_is_reproducible(self) -> None:
        rabbit = LinearRabbit(0, 1)
        first = run_hunt(rabbit, KLOGK_HUNTER, 5000, 11, trace=True)
        second = run_hunt(rabbit, KLOGK_HUNTER, 5000, 11, trace=True)

        assert first == second
        radii = KLOGK.values(np.arange(1, len(first.guesses) + 1))
        assert np.all(np.abs(first.guesses) <= radii)

    def test_hunter_instances_are_accepted(self) -> None:
        hunter = ProbabilisticHunter(KLOGK, 11)

        outcome = run_hunt(LinearRabbit(0, 1), hunter, 5000)

        assert outcome == run_hunt(LinearRabbit(0, 1), KLOGK_HUNTER, 5000, 11)

    def test_large_rabbit_uses_the_exact_path(self) -> None:
        outcome = run_hunt(LinearRabbit(0, 2**62), DIAGONAL, 50)

        assert not outcome.hit

    def test_lattice_rabbit(self) -> None:
        rabbit = LatticeRabbit2D(1, 0, -1, 1)
        strategy = StrategySpec("diagonal", dimension=4)

        outcome = run_hunt(rabbit, strategy, 1000)

        assert outcome.hit
        assert outcome.step <= DiagonalHunter(4).capture_step(rabbit)
        assert outcome.hit_guess == rabbit.position(outcome.step)

    @pytest.mark.parametrize("cutoff", [0, -5, 2.5])
    def test_invalid_cutoff(self, cutoff: object) -> None:
        with pytest.raises(ValidationError):
            run_hunt(LinearRabbit(0, 0), DIAGONAL, cutoff)

    def test_pairing_checked(self) -> None:
        with pytest.raises(ValidationError):
            run_hunt(LatticeRabbit2D(0, 0, 0, 0), KLOGK_HUNTER, 10, 1)


class TestDiagonalGuarantee:
    def test_every_line_in_the_box(self) -> None:
        hunter = DiagonalHunter()
        grid = range(-50, 51)
        rabbits = [LinearRabbit(a, b) for a, b in itertools.product(grid, grid)]

        outcomes = sweep_diagonal(hunter, rabbits, covering_bound(2, 50))

        assert len(outcomes) == 10_201
        assert_captured(hunter, rabbits, outcomes)

    def test_sweep_agrees_with_single_hunts(self) -> None:
        hunter = DiagonalHunter()
        rabbits = [LinearRabbit(a, b) for a, b in [(1, 1), (3, -1), (40, -7)]]

        outcomes = sweep_diagonal(hunter, rabbits, 10_000)

        assert outcomes == [run_hunt(r, hunter, 10_000) for r in rabbits]

    def test_every_quadratic_in_the_box(self) -> None:
        hunter = DiagonalHunter(3)
        grid = range(-8, 9)
        rabbits = [
            PolynomialRabbit(coeffs) for coeffs in itertools.product(grid, repeat=3)
        ]

        outcomes = sweep_diagonal(hunter, rabbits, covering_bound(3, 8))

        assert_captured(hunter, rabbits, outcomes)

    def test_every_lattice_walk_in_the_box(self) -> None:
        hunter = DiagonalHunter(4)
        grid = range(-5, 6)
        rabbits = [LatticeRabbit2D(*p) for p in itertools.product(grid, repeat=4)]

        outcomes = sweep_diagonal(hunter, rabbits, covering_bound(4, 5))

        assert len(outcomes) == 14_641
        assert_captured(hunter, rabbits, outcomes)


class TestRunTrials:
    def test_origin_rabbit_batch(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 0), KLOGK_HUNTER, 10, master_seed=1, trials=1000
        )

        result = run_trials(config)

        assert result.hit_steps.tolist() == [1] * 1000
        assert result.censored_count == 0
        assert result.survival[0] == 0.0

    def test_same_seed_same_batch(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 500, master_seed=42, trials=200
        )

        assert run_trials(config).same_as(run_trials(config))

    def test_worker_count_does_not_change_results(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 500, master_seed=42, trials=60
        )

        assert run_trials(config, workers=1).same_as(run_trials(config, workers=3))

    def test_trial_zero_matches_a_single_hunt(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 500, master_seed=42, trials=5
        )
        single = run_hunt(config.rabbit, KLOGK_HUNTER, 500, derive_trial_seed(42, 0))

        assert run_trials(config).trial_steps[0] == (single.step or 0)

    def test_censoring_consistency(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 50, master_seed=3, trials=300
        )

        result = run_trials(config)

        assert result.censored_count == result.trials - len(result.hit_steps)
        assert result.hit_steps.max(initial=0) <= 50
        assert np.all(np.diff(result.survival) <= 0)

    def test_empirical_survival_agrees_with_the_product_formula(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 2000, master_seed=2024, trials=10_000
        )

        result = run_trials(config)
        curve = analytic_survival(config.rabbit, KLOGK, 2000)
        report = survival_agreement(result, curve)

        assert report.sampled == 200
        assert report.hit_fraction_agrees
        assert report.passes

    def test_config_validation(self) -> None:
        with pytest.raises(ValidationError):
            HuntConfig(LinearRabbit(0, 0), KLOGK_HUNTER, 10, master_seed=1, trials=0)
        with pytest.raises(ValidationError):
            HuntConfig(LinearRabbit(0, 0), KLOGK_HUNTER, 10, master_seed=-1)


class TestRealRabbits:
    def test_real_rabbits_are_caught_within_tolerance(self) -> None:
        generator = Generator(PCG64(7))
        points = generator.uniform(-5, 5, size=(100, 2))
        rabbits = [RealLinearRabbit(a, b) for a, b in points]
        cutoff = 10**5

        outcomes = [
            run_hunt(rabbit, KLOGK_HUNTER, cutoff, derive_trial_seed(7, i))
            for i, rabbit in enumerate(rabbits)
        ]
        finals = [analytic_survival(r, KLOGK, cutoff).at(cutoff) for r in rabbits]

        hits = sum(outcome.hit for outcome in outcomes)
        expected = sum(1 - s for s in finals)
        stderr = math.sqrt(sum(s * (1 - s) for s in finals))
        assert abs(hits - expected) <= 3 * stderr
        for rabbit, outcome in zip(rabbits, outcomes, strict=True):
            if outcome.hit:
                assert abs(rabbit.position(outcome.step) - outcome.hit_guess) <= 0.5


class TestMeanExcess:
    def test_origin_rabbit(self) -> None:
        result = TrialBatchResult(1, 100, np.ones(50, dtype=np.int64))

        means = empirical_mean_excess(result, [1, 10, 100])

        assert [m.mean for m in means] == [1.0, 1.0, 1.0]
        assert [m.stderr for m in means] == [0.0, 0.0, 0.0]

    def test_censored_trials_count_as_the_horizon(self) -> None:
        result = TrialBatchResult(1, 10, np.array([2, 0, 5, 0], dtype=np.int64))

        means = empirical_mean_excess(result, [3, 10])

        assert means[0].mean == pytest.approx((2 + 3 + 3 + 3) / 4)
        assert means[1].mean == pytest.approx((2 + 10 + 5 + 10) / 4)

    def test_non_decreasing_in_the_horizon(self) -> None:
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 1000, master_seed=9, trials=200
        )
        result = run_trials(config)

        means = [m.mean for m in empirical_mean_excess(result, [10, 100, 1000])]

        assert means == sorted(means)

    def test_agrees_with_the_analytic_truncated_means(self) -> None:
        horizons = [10**3, 10**4, 10**5]
        config = HuntConfig(
            LinearRabbit(0, 1), KLOGK_HUNTER, 10**5, master_seed=31, trials=400
        )

        means = empirical_mean_excess(run_trials(config), horizons)

        analytic = dict(
            truncated_means(analytic_survival(config.rabbit, KLOGK, 10**5), horizons)
        )
        for excess in means:
            assert abs(excess.mean - analytic[excess.horizon]) <= 3 * excess.stderr
        assert means[-1].mean > 2 * means[0].mean

    def test_horizon_beyond_cutoff(self) -> None:
        result = TrialBatchResult(1, 10, np.ones(3, dtype=np.int64))

        with pytest.raises(ValidationError):
            empirical_mean_excess(result, [11])


def test_deterministic_batches_agree_exactly() -> None:
    config = HuntConfig(LinearRabbit(2, -1), DIAGONAL, 100, master_seed=0, trials=5)
    result = run_trials(config)

    report = survival_agreement(result, deterministic_survival(10, 100), sample_every=1)

    assert result.hit_steps.tolist() == [10] * 5
    assert report.passes
