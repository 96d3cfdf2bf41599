"""Validate an envelope function against the hunting conditions."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from django.core.management.base import CommandError, CommandParser

from apps.common.serializers import render_json
from apps.hunting.analysis import envelope_validation
from apps.hunting.cli import ExitCode, HuntingCommand, RunManifest
from apps.hunting.serializers import EnvelopeValidationSerializer

DEFAULT_HORIZON = 100_000


class Command(HuntingCommand):
    """Print the envelope report as JSON."""

    help = (
        "Check monotonicity, superlinear growth and the divergence class of a "
        "registered envelope (klogk, xloglog, k15, k2, k)."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("name", help="Registered envelope name.")
        parser.add_argument("--horizon", type=int, help="Steps to examine.")
        self.add_seed_argument(parser)
        parser.add_argument("--out", help="Also write the report JSON here.")
        parser.add_argument(
            "--check",
            action="store_true",
            default=None,
            help="Exit 6 unless the envelope is accepted for hunting.",
        )

    def run(self, options: dict[str, Any]) -> None:
        horizon = self.option(options, "horizon", DEFAULT_HORIZON)
        seed = self.resolve_seed(options)
        data = EnvelopeValidationSerializer(
            envelope_validation(options["name"], horizon)
        ).data
        payload = render_json(data)
        self.emit(payload)

        if options.get("out"):
            out = Path(options["out"])
            self.prepare_directory(out.parent)
            self.write_bytes(out, payload)
            config = {"name": options["name"], "horizon": horizon, "seed": seed}
            self.write_sidecar(out, RunManifest("validate_h", seed, config))

        report = data["report"]
        if options.get("check") and not report["accepted"]:
            raise CommandError(
                f"Envelope '{report['name']}' rejected "
                f"(class {report['divergence_class']}).",
                returncode=ExitCode.CHECK_FAILED,
            )
