"""Print the analytic survival curve of a hunt as CSV."""

from __future__ import annotations

from functools import partial
from pathlib import Path
from typing import Any

from django.conf import settings
from django.core.management.base import CommandParser

from apps.common.serializers import render_json
from apps.hunting.analysis import (
    analytic_survival,
    deterministic_survival,
    truncated_mean,
)
from apps.hunting.cli import HuntingCommand, RunManifest
from apps.hunting.exports import SURVIVAL_HEADER, survival_rows, write_rows
from apps.hunting.serializers import SurvivalSummarySerializer
from apps.hunting.simulation import run_hunt
from apps.hunting.specs import parse_rabbit, parse_strategy


class Command(HuntingCommand):
    """Analytic ``S(k)`` with no sampling involved."""

    help = (
        "Write k,p_k,S_k for a rabbit under a strategy. Probabilistic strategies "
        "use the exact product formula; diagonal ones the deterministic step."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("--rabbit", help="Rabbit spec.")
        parser.add_argument("--strategy", help="Strategy spec.")
        parser.add_argument("--horizon", type=int, help="Last step K.")
        self.add_seed_argument(parser)
        parser.add_argument("--out", help="Write the CSV here instead of stdout.")

    def run(self, options: dict[str, Any]) -> None:
        rabbit = parse_rabbit(self.require(options, "rabbit"))
        strategy = parse_strategy(self.require(options, "strategy"))
        strategy.check_pairing(rabbit)
        horizon = self.option(
            options, "horizon", settings.RABBIT_HUNT_DEFAULT_CUTOFF
        )
        seed = self.resolve_seed(options)

        hit_step = None
        if strategy.seeded:
            curve = analytic_survival(rabbit, strategy.h(), horizon)
        else:
            hit_step = run_hunt(rabbit, strategy, horizon).step
            curve = deterministic_survival(hit_step, horizon)
        summary = SurvivalSummarySerializer(
            {
                "rabbit": rabbit.spec,
                "strategy": strategy.spec,
                "horizon": curve.horizon,
                "final_survival": curve.at(curve.horizon),
                "truncated_mean": truncated_mean(curve),
                "hit_step": hit_step,
            }
        ).data

        if not options.get("out"):
            write_rows(self.stdout, SURVIVAL_HEADER, survival_rows(curve))
            return
        out = Path(options["out"])
        self.prepare_directory(out.parent)
        self.write_text(
            out, partial(write_rows, header=SURVIVAL_HEADER, rows=survival_rows(curve))
        )
        manifest = RunManifest(
            "survival",
            seed,
            {
                "rabbit": rabbit.spec,
                "strategy": strategy.spec,
                "horizon": horizon,
                "seed": seed,
            },
        )
        summary_path = out.with_name(f"{out.stem}.summary.json")
        self.write_bytes(summary_path, render_json(summary))
        self.write_sidecar(out, manifest, summary_path.name)
        self.status(
            f"S({curve.horizon}) = {summary['final_survival']!r}, "
            f"truncated mean {summary['truncated_mean']!r}"
        )
