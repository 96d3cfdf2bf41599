"""Run a seeded Monte Carlo batch and write trials, survival and summary files."""

from __future__ import annotations

from functools import partial
from typing import Any

from django.conf import settings
from django.core.management.base import CommandError, CommandParser

from apps.common.serializers import render_json
from apps.hunting.analysis import (
    SurvivalCurve,
    analytic_survival,
    deterministic_survival,
    truncated_mean,
)
from apps.hunting.cli import (
    ExitCode,
    HuntingCommand,
    RunManifest,
    decade_horizons,
    ordered_config,
    parse_int_list,
)
from apps.hunting.exports import (
    BATCH_SURVIVAL_HEADER,
    TRIALS_HEADER,
    batch_survival_rows,
    trial_rows,
    write_rows,
)
from apps.hunting.models import HuntRun
from apps.hunting.serializers import BatchSummarySerializer
from apps.hunting.simulation import (
    HuntConfig,
    TrialBatchResult,
    empirical_mean_excess,
    run_hunt,
    run_trials,
    survival_agreement,
)
from apps.hunting.specs import parse_rabbit, parse_strategy

OUTPUT_FILES = ("trials.csv", "survival.csv", "summary.json", "manifest.json")
CONFIG_KEYS = (
    "rabbit",
    "strategy",
    "cutoff",
    "trials",
    "seed",
    "horizons",
    "sample_every",
)


def reference_curve(config: HuntConfig) -> SurvivalCurve:
    """Analytic survival for seeded strategies, the exact step function otherwise."""

    if config.strategy.seeded:
        return analytic_survival(config.rabbit, config.strategy.h(), config.cutoff)
    outcome = run_hunt(config.rabbit, config.strategy, config.cutoff)
    return deterministic_survival(outcome.step, config.cutoff)


def batch_summary(
    config: HuntConfig,
    result: TrialBatchResult,
    curve: SurvivalCurve,
    horizons: list[int],
    sample_every: int,
) -> dict[str, Any]:
    means = [
        {
            "horizon": m.horizon,
            "mean": m.mean,
            "stderr": m.stderr,
            "analytic": truncated_mean(curve.truncate(m.horizon)),
        }
        for m in empirical_mean_excess(result, horizons)
    ]
    return {
        "rabbit": config.rabbit.spec,
        "strategy": config.strategy.spec,
        "master_seed": config.master_seed,
        "trials": result.trials,
        "cutoff": result.cutoff,
        "hits": result.trials - result.censored_count,
        "censored_count": result.censored_count,
        "hit_fraction": result.hit_fraction,
        "truncated_means": means,
        "agreement": survival_agreement(result, curve, sample_every),
    }


class Command(HuntingCommand):
    """Monte Carlo batch of independent hunts with per-trial seeds."""

    help = (
        "Run --trials hunts and write trials.csv, survival.csv, summary.json and "
        "manifest.json into --out. Re-running with --config <out>/manifest.json "
        "reproduces the files byte for byte."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("--rabbit", help="Rabbit spec, e.g. linear:0,1.")
        parser.add_argument("--strategy", help="Strategy spec.")
        parser.add_argument("--cutoff", type=int, help="Censoring step K.")
        parser.add_argument("--trials", type=int, help="Number of hunts.")
        self.add_seed_argument(parser)
        parser.add_argument("--out", help="Output directory.")
        parser.add_argument(
            "--horizons", help="Comma-separated truncation horizons (<= cutoff)."
        )
        parser.add_argument("--workers", type=int, help="Worker processes.")
        parser.add_argument(
            "--sample-every",
            type=int,
            dest="sample_every",
            help="Spacing of the sampled steps for the agreement check.",
        )
        parser.add_argument(
            "--check",
            action="store_true",
            default=None,
            help="Exit 6 unless empirical and analytic survival agree.",
        )
        parser.add_argument(
            "--record",
            action="store_true",
            default=None,
            help="Store the manifest and summary as a HuntRun row.",
        )

    def run(self, options: dict[str, Any]) -> None:
        config = HuntConfig(
            rabbit=parse_rabbit(self.require(options, "rabbit")),
            strategy=parse_strategy(self.require(options, "strategy")),
            cutoff=self.option(options, "cutoff", settings.RABBIT_HUNT_DEFAULT_CUTOFF),
            trials=self.require(options, "trials"),
            master_seed=self.resolve_seed(options),
        )
        horizons = parse_int_list(options.get("horizons"), "horizons") or (
            decade_horizons(config.cutoff)
        )
        sample_every = self.option(options, "sample_every", 10)
        out = self.prepare_directory(
            options.get("out")
            or settings.RABBIT_HUNT_OUTPUT_DIR / f"seed-{config.master_seed}"
        )
        workers = self.option(options, "workers", settings.RABBIT_HUNT_WORKERS)

        result = run_trials(config, workers=workers)
        curve = reference_curve(config)
        summary = BatchSummarySerializer(
            batch_summary(config, result, curve, horizons, sample_every)
        ).data
        manifest = RunManifest(
            command="montecarlo",
            master_seed=config.master_seed,
            config=ordered_config(
                {
                    "rabbit": config.rabbit.spec,
                    "strategy": config.strategy.spec,
                    "cutoff": config.cutoff,
                    "trials": config.trials,
                    "seed": config.master_seed,
                    "horizons": horizons,
                    "sample_every": sample_every,
                },
                CONFIG_KEYS,
            ),
            outputs=list(OUTPUT_FILES),
        )

        self.write_text(
            out / "trials.csv",
            partial(write_rows, header=TRIALS_HEADER, rows=trial_rows(result)),
        )
        self.write_text(
            out / "survival.csv",
            partial(
                write_rows,
                header=BATCH_SURVIVAL_HEADER,
                rows=batch_survival_rows(result, curve),
            ),
        )
        self.write_bytes(out / "summary.json", render_json(summary))
        self.write_bytes(out / "manifest.json", manifest.to_json())

        if options.get("record"):
            HuntRun.objects.create(
                rabbit=config.rabbit.spec,
                rabbit_kind=config.rabbit.kind,
                strategy=config.strategy.spec,
                strategy_kind=config.strategy.kind,
                master_seed=str(config.master_seed),
                trials=result.trials,
                cutoff=result.cutoff,
                censored_count=result.censored_count,
                hit_fraction=result.hit_fraction,
                manifest=manifest.to_dict(),
                summary=dict(summary),
            )

        self.status(
            f"{result.trials - result.censored_count}/{result.trials} hits, "
            f"seed {config.master_seed}, files in {out}"
        )
        agreement = summary["agreement"]
        if options.get("check") and not agreement["passes"]:
            raise CommandError(
                f"Survival check failed: {agreement['passing']}/"
                f"{agreement['sampled']} sampled steps within 3 sigma.",
                returncode=ExitCode.CHECK_FAILED,
            )
