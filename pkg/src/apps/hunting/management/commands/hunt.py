"""Run a single hunt and print its outcome as JSON."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from django.conf import settings
from django.core.management.base import CommandError, CommandParser

from apps.common.serializers import render_json
from apps.hunting.cli import ExitCode, HuntingCommand, RunManifest, ordered_config
from apps.hunting.serializers import HuntOutcomeSerializer
from apps.hunting.simulation import run_hunt
from apps.hunting.specs import parse_rabbit, parse_strategy
from apps.hunting.strategies import derive_trial_seed


class Command(HuntingCommand):
    """Hunt one rabbit with one strategy up to a cutoff."""

    help = (
        "Hunt a rabbit (e.g. linear:1,1) with a strategy (diagonal:snake or "
        "probabilistic:klogk). Exit 0 on a hit, 3 when censored."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("--rabbit", help="Rabbit spec, e.g. linear:5,-3.")
        parser.add_argument("--strategy", help="Strategy spec, e.g. diagonal:snake.")
        parser.add_argument("--cutoff", type=int, help="Last step to try.")
        self.add_seed_argument(parser)
        parser.add_argument("--out", help="Also write the outcome JSON here.")

    def run(self, options: dict[str, Any]) -> None:
        rabbit = parse_rabbit(self.require(options, "rabbit"))
        strategy = parse_strategy(self.require(options, "strategy"))
        cutoff = self.option(options, "cutoff", settings.RABBIT_HUNT_DEFAULT_CUTOFF)
        seed = self.resolve_seed(options)

        # Trial 0 of a batch with the same master seed follows the same stream.
        hunter_seed = derive_trial_seed(seed, 0) if strategy.seeded else None
        outcome = run_hunt(rabbit, strategy, cutoff, hunter_seed)
        payload = render_json(HuntOutcomeSerializer(outcome).data)
        self.emit(payload)

        if options.get("out"):
            out = Path(options["out"])
            self.prepare_directory(out.parent)
            self.write_bytes(out, payload)
            config = {
                "rabbit": rabbit.spec,
                "strategy": strategy.spec,
                "cutoff": cutoff,
                "seed": seed,
            }
            manifest = RunManifest("hunt", seed, ordered_config(config, config))
            self.write_sidecar(out, manifest)

        if not outcome.hit:
            raise CommandError(
                f"Rabbit not hit within {cutoff} steps (seed {seed}).",
                returncode=ExitCode.CENSORED,
            )
        self.status(f"Hit at step {outcome.step} (seed {seed}).")
