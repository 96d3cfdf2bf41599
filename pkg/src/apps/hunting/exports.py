"""CSV layouts written by the management commands.

Headers are fixed; numbers use :func:`apps.common.formatting.format_number`
so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from typing import TextIO

from apps.common.formatting import format_number

from .analysis import SurvivalCurve
from .simulation import TrialBatchResult

TRIALS_HEADER = ("trial", "hit_step", "censored_at")
SURVIVAL_HEADER = ("k", "p_k", "S_k")
BATCH_SURVIVAL_HEADER = ("k", "p_k", "S_analytic", "S_empirical")


def enumeration_header(dimension: int) -> tuple[str, ...]:
    return ("index", *(f"x{i}" for i in range(1, dimension + 1)))


def _cell(value: object) -> str:
    return "" if value is None else format_number(value)


def write_rows(
    stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> int:
    """Write ``header`` and ``rows``; returns the number of data rows."""

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([_cell(value) for value in row])
        count += 1
    return count


def trial_rows(
    result: TrialBatchResult,
) -> Iterable[tuple[int, int | None, int | None]]:
    for i, step in enumerate(result.trial_steps.tolist()):
        yield (i, step, None) if step else (i, None, result.cutoff)


def survival_rows(curve: SurvivalCurve) -> Iterable[tuple[int, float, float]]:
    steps = curve.steps.tolist()
    return zip(steps, curve.p_values.tolist(), curve.s_values.tolist(), strict=True)


def batch_survival_rows(
    result: TrialBatchResult, curve: SurvivalCurve
) -> Iterable[tuple[int, float, float, float]]:
    window = curve.truncate(result.cutoff)
    return zip(
        window.steps.tolist(),
        window.p_values.tolist(),
        window.s_values.tolist(),
        result.survival.tolist(),
        strict=True,
    )
