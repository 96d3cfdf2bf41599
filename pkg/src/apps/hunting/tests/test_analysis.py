"""Tests for the closed-form survival and series diagnostics."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from django.core.exceptions import ValidationError

from apps.hunting.analysis import (
    analytic_survival,
    containment_loss_step,
    deterministic_survival,
    envelope_miss_terms,
    envelope_validation,
    hit_probabilities,
    integral_test_sandwich,
    log_series_equivalence_check,
    raabe_profile,
    raabe_rho,
    reciprocal_partial_sums,
    step_hit_prob,
    survival_from_probabilities,
    truncated_mean,
    truncated_means,
)
from apps.hunting.envelopes import K15, KLOGK, HFunction
from apps.hunting.rabbits import (
    LatticeRabbit2D,
    LinearRabbit,
    PolynomialRabbit,
    RealLinearRabbit,
)


class TestHitProbabilities:
    def test_outside_the_envelope(self) -> None:
        rabbit = LinearRabbit(5, 0)

        assert [step_hit_prob(rabbit, KLOGK, n) for n in (1, 2, 3)] == [0.0] * 3
        assert step_hit_prob(rabbit, KLOGK, 4) == pytest.approx(1 / 11)

    def test_origin_is_struck_at_step_one(self) -> None:
        assert step_hit_prob(LinearRabbit(0, 0), KLOGK, 1) == 1.0

    def test_vector_matches_scalar(self) -> None:
        rabbit = LinearRabbit(3, 2)
        p = hit_probabilities(rabbit, KLOGK, 500)

        assert p.tolist() == [step_hit_prob(rabbit, KLOGK, n) for n in range(1, 501)]

    def test_real_rabbit_on_a_tie_counts_twice(self) -> None:
        rabbit = RealLinearRabbit(0.0, 0.5)

        assert step_hit_prob(rabbit, KLOGK, 3) == pytest.approx(2 / 7)

    def test_lattice_rabbits_are_rejected(self) -> None:
        with pytest.raises(ValidationError):
            hit_probabilities(LatticeRabbit2D(0, 0, 1, 1), KLOGK, 10)


class TestSurvival:
    def test_product_formula(self) -> None:
        curve = analytic_survival(LinearRabbit(5, 0), KLOGK, 4)

        assert curve.at(0) == 1.0
        assert curve.at(3) == 1.0
        assert curve.at(4) == pytest.approx(10 / 11)

    def test_certain_hit_drives_survival_to_zero(self) -> None:
        curve = analytic_survival(LinearRabbit(0, 0), KLOGK, 5)

        assert curve.s_values.tolist() == [0.0] * 5

    def test_non_increasing(self) -> None:
        curve = analytic_survival(LinearRabbit(0, 1), KLOGK, 20_000)

        assert np.all(np.diff(curve.s_values) <= 0)
        assert 0 < curve.at(20_000) < 1

    def test_probabilities_must_be_valid(self) -> None:
        with pytest.raises(ValidationError):
            survival_from_probabilities(np.array([0.5, 1.5]))

    def test_step_function_for_deterministic_hunts(self) -> None:
        curve = deterministic_survival(3, 5)

        assert curve.s_values.tolist() == [1.0, 1.0, 0.0, 0.0, 0.0]
        assert deterministic_survival(None, 3).s_values.tolist() == [1.0] * 3

    def test_truncate_and_bounds(self) -> None:
        curve = deterministic_survival(2, 4)

        assert curve.truncate(2).horizon == 2
        with pytest.raises(ValidationError):
            curve.truncate(5)
        with pytest.raises(ValidationError):
            curve.at(5)


class TestTruncatedMean:
    def test_mean_of_a_deterministic_hunt(self) -> None:
        # E[min(T, K)] with T = 3.
        assert truncated_mean(deterministic_survival(3, 10)) == 3.0
        assert truncated_mean(deterministic_survival(None, 10)) == 10.0

    def test_origin_rabbit(self) -> None:
        assert truncated_mean(analytic_survival(LinearRabbit(0, 0), KLOGK, 50)) == 1.0

    def test_heavy_tail_has_no_plateau(self) -> None:
        curve = analytic_survival(LinearRabbit(0, 1), KLOGK, 100_000)
        means = dict(truncated_means(curve, [10**e for e in range(2, 6)]))

        assert means[10**5] >= 2 * means[10**3]
        increments = np.diff([means[10**e] for e in range(2, 6)])
        assert np.all(increments > 10)


class TestRaabe:
    def test_exact_rationals(self) -> None:
        assert raabe_rho(10, KLOGK) == Fraction(10, 51)
        assert raabe_rho(1000, KLOGK) == Fraction(1000, 13829)

    def test_decreasing_towards_zero(self) -> None:
        profile = raabe_profile(KLOGK, 10, 10**6)
        decades = [float(raabe_rho(10**e, KLOGK)) for e in range(1, 7)]

        assert profile.max() < 0.25
        assert all(b < a for a, b in zip(decades, decades[1:]))
        assert 2 * math.log(10**6) * decades[-1] == pytest.approx(1, rel=0.02)
        assert profile[-1] == pytest.approx(decades[-1])

    def test_undefined_denominator(self) -> None:
        flat = HFunction(name="flat", scalar=lambda n: 0)

        with pytest.raises(ValidationError):
            raabe_rho(5, flat)
        with pytest.raises(ValidationError):
            raabe_profile(flat, 1, 10)


class TestSeries:
    def test_integral_sandwich_for_klogk(self) -> None:
        rows = integral_test_sandwich(reciprocal_partial_sums(KLOGK, 10**6))

        assert [row.m for row in rows] == [10**2, 10**3, 10**4, 10**5, 10**6]
        assert all(row.passes for row in rows)
        assert all(row.floored >= row.companion for row in rows)

    def test_partial_sum_indexing(self) -> None:
        sums = reciprocal_partial_sums(KLOGK, 10)

        # Terms 1/max(h(k), 1) for k = 2, 3: 1/1 + 1/3.
        assert sums.at(3) == pytest.approx(4 / 3)
        with pytest.raises(ValidationError):
            sums.at(1)

    def test_sandwich_needs_a_companion(self) -> None:
        bare = HFunction(name="bare", scalar=lambda n: n * n)

        with pytest.raises(ValidationError):
            integral_test_sandwich(reciprocal_partial_sums(bare, 100))

    def test_k15_tail_is_small(self) -> None:
        k15 = reciprocal_partial_sums(K15, 10**5)
        klogk = reciprocal_partial_sums(KLOGK, 10**5)

        tail = k15.at(10**5) - k15.at(10**4)
        assert tail < 2 / math.sqrt(10**4)
        assert tail * 10 < klogk.at(10**5) - klogk.at(10**4)

    def test_log_series_equivalence(self) -> None:
        report = log_series_equivalence_check(envelope_miss_terms(KLOGK, 10**6))

        assert report.terms == 10**6 - 1
        assert 0.9 <= report.ratio <= 1.0

    def test_log_series_of_constant_terms(self) -> None:
        report = log_series_equivalence_check([1.0] * 10)

        assert report.ratio == pytest.approx(math.log(2))
        assert log_series_equivalence_check([]).ratio is None

    def test_negative_terms_rejected(self) -> None:
        with pytest.raises(ValidationError):
            log_series_equivalence_check([0.5, -0.1])


class TestContainment:
    def test_quadratic_rabbits_escape_klogk(self) -> None:
        grid = range(-8, 9)

        for a, b, c in itertools.product(grid, grid, grid):
            if c == 0:
                continue
            step = containment_loss_step(PolynomialRabbit((a, b, c)), KLOGK, 10**5)
            assert step is not None and step <= 10**5, (a, b, c)

    def test_linear_rabbit_stays_contained(self) -> None:
        assert containment_loss_step(LinearRabbit(3, 5), KLOGK, 10**4) is None

    def test_never_contained(self) -> None:
        assert containment_loss_step(LinearRabbit(5, 0), KLOGK, 3) == 1


def test_envelope_validation_includes_the_sandwich() -> None:
    result = envelope_validation("klogk", 10**4)

    assert result["report"].accepted
    assert [row.m for row in result["sandwich"]] == [100, 1000, 10_000]
    assert result["sandwich_passes"] is True


def test_envelope_validation_without_companion_checks() -> None:
    result = envelope_validation("k15", 1000)

    assert result["sandwich"] is None
    assert result["sandwich_passes"] is None
