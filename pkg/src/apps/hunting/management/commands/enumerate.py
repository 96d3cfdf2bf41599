"""Dump the lattice enumeration as CSV."""

from __future__ import annotations

from functools import partial
from pathlib import Path
from typing import Any

from django.core.exceptions import ValidationError
from django.core.management.base import CommandParser

from apps.hunting.cli import HuntingCommand, RunManifest
from apps.hunting.enumeration import Enumeration
from apps.hunting.exports import enumeration_header, write_rows


class Command(HuntingCommand):
    """Print ``index,x1..xd`` rows for a prefix or a box of Z^d."""

    help = "Enumerate Z^d (d in 2, 3, 4) by index (--count) or by box (--box)."

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("--d", type=int, dest="d", help="Dimension (2, 3 or 4).")
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--count", type=int, help="First N indices.")
        group.add_argument("--box", type=int, help="All points with |x_i| <= R.")
        self.add_seed_argument(parser)
        parser.add_argument("--out", help="Write the CSV here instead of stdout.")

    def run(self, options: dict[str, Any]) -> None:
        enumeration = Enumeration(self.option(options, "d", 2))
        seed = self.resolve_seed(options)
        count, radius = options.get("count"), options.get("box")
        if (count is None) == (radius is None):
            raise ValidationError({"count": "Give exactly one of --count or --box."})
        if count is not None:
            rows = ((k, *point) for k, point in enumeration.prefix(count))
        else:
            rows = ((k, *point) for k, point in enumeration.box(radius))
        header = enumeration_header(enumeration.dimension)

        if not options.get("out"):
            write_rows(self.stdout, header, rows)
            return
        out = Path(options["out"])
        self.prepare_directory(out.parent)
        self.write_text(out, partial(write_rows, header=header, rows=rows))
        config = {
            "d": enumeration.dimension,
            "count": count,
            "box": radius,
            "seed": seed,
        }
        manifest = RunManifest(
            "enumerate", seed, {k: v for k, v in config.items() if v is not None}
        )
        self.write_sidecar(out, manifest)
        self.status(f"Wrote {out}")
