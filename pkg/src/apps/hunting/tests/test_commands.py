"""Tests for the hunting management commands."""

from __future__ import annotations

import csv
import json
from io import StringIO
from pathlib import Path

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.hunting.cli import ExitCode, read_run_config
from apps.hunting.management.commands import montecarlo
from apps.hunting.models import HuntRun
from apps.hunting.simulation import AgreementReport


def run(name: str, *args: object, **options: object) -> str:
    stdout = StringIO()
    call_command(name, *args, stdout=stdout, stderr=StringIO(), **options)
    return stdout.getvalue()


def exit_code(name: str, *args: object, **options: object) -> int:
    with pytest.raises(CommandError) as excinfo:
        run(name, *args, **options)
    return excinfo.value.returncode


def read_csv(path: Path) -> list[list[str]]:
    with path.open(newline="", encoding="utf-8") as stream:
        return list(csv.reader(stream))


class TestHuntCommand:
    def test_hit_prints_the_outcome(self) -> None:
        output = run(
            "hunt", rabbit="linear:1,1", strategy="diagonal:snake", cutoff=100
        )

        assert output == (
            '{"hit":true,"step":3,"censored_at":null,"guesses_count":3}\n'
        )

    def test_censored_hunt_exits_3(self) -> None:
        code = exit_code(
            "hunt", rabbit="linear:1,1", strategy="diagonal:snake", cutoff=2
        )

        assert code == ExitCode.CENSORED

    def test_usage_errors_exit_2(self) -> None:
        assert exit_code("hunt", rabbit="linear:x", strategy="diagonal:snake") == 2
        assert exit_code("hunt", strategy="diagonal:snake") == 2
        assert (
            exit_code("hunt", rabbit="lattice:0,0,1,1", strategy="probabilistic:klogk")
            == 2
        )

    def test_zero_cutoff_is_not_replaced_by_the_default(self) -> None:
        code = exit_code(
            "hunt", rabbit="linear:40,-7", strategy="diagonal:snake", cutoff=0
        )

        assert code == ExitCode.USAGE

    def test_arithmetic_errors_exit_4(self) -> None:
        code = exit_code(
            "hunt",
            rabbit="real-linear:0,1e308",
            strategy="diagonal:snake",
            cutoff=10,
        )

        assert code == ExitCode.ARITHMETIC

    def test_unwritable_output_exits_5(self, tmp_path: Path) -> None:
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")

        code = exit_code(
            "hunt",
            rabbit="linear:1,1",
            strategy="diagonal:snake",
            out=str(blocker / "hunt.json"),
        )

        assert code == ExitCode.UNWRITABLE

    def test_out_writes_a_sidecar_manifest(self, tmp_path: Path) -> None:
        out = tmp_path / "hunt.json"

        stdout = run(
            "hunt",
            rabbit="linear:0,0",
            strategy="probabilistic:klogk",
            seed=5,
            cutoff=10,
            out=str(out),
        )

        assert out.read_text(encoding="utf-8") == stdout
        manifest = json.loads((tmp_path / "hunt.manifest.json").read_text())
        assert manifest["command"] == "hunt"
        assert manifest["master_seed"] == 5
        assert manifest["config"] == {
            "rabbit": "linear:0,0",
            "strategy": "probabilistic:klogk",
            "cutoff": 10,
            "seed": 5,
        }
        assert manifest["outputs"] == ["hunt.json", "hunt.manifest.json"]

    def test_config_file_supplies_flags(self, tmp_path: Path) -> None:
        config = tmp_path / "run.env"
        config.write_text(
            "RABBIT=linear:1,1\nSTRATEGY=diagonal:snake\nCUTOFF=100\n",
            encoding="utf-8",
        )

        assert '"step":3' in run("hunt", config=str(config))
        assert exit_code("hunt", config=str(config), cutoff=2) == ExitCode.CENSORED

    def test_config_file_rejects_unknown_keys(self, tmp_path: Path) -> None:
        config = tmp_path / "run.env"
        config.write_text("RABBIT=linear:1,1\nCOLOUR=red\n", encoding="utf-8")

        assert exit_code("hunt", config=str(config)) == ExitCode.USAGE

    def test_missing_config_file(self, tmp_path: Path) -> None:
        assert exit_code("hunt", config=str(tmp_path / "nope.env")) == ExitCode.USAGE


class TestMontecarloCommand:
    options = {
        "rabbit": "linear:0,1",
        "strategy": "probabilistic:klogk",
        "cutoff": 200,
        "trials": 300,
        "seed": 1234,
    }

    def files(self, directory: Path) -> dict[str, bytes]:
        return {
            name: (directory / name).read_bytes() for name in montecarlo.OUTPUT_FILES
        }

    def test_writes_all_outputs(self, tmp_path: Path) -> None:
        run("montecarlo", out=str(tmp_path), **self.options)

        trials = read_csv(tmp_path / "trials.csv")
        survival = read_csv(tmp_path / "survival.csv")
        summary = json.loads((tmp_path / "summary.json").read_text())
        manifest = json.loads((tmp_path / "manifest.json").read_text())

        assert trials[0] == ["trial", "hit_step", "censored_at"]
        assert len(trials) == 301
        assert survival[0] == ["k", "p_k", "S_analytic", "S_empirical"]
        assert len(survival) == 201
        assert summary["trials"] == 300
        assert summary["hits"] + summary["censored_count"] == 300
        assert [m["horizon"] for m in summary["truncated_means"]] == [10, 100, 200]
        assert manifest["config"] == {
            **self.options,
            "horizons": [10, 100, 200],
            "sample_every": 10,
        }

    def test_reruns_are_byte_identical_across_worker_counts(
        self, tmp_path: Path
    ) -> None:
        first, second, replay = (tmp_path / name for name in ("a", "b", "c"))

        run("montecarlo", out=str(first), workers=1, **self.options)
        run("montecarlo", out=str(second), workers=2, **self.options)
        run("montecarlo", config=str(first / "manifest.json"), out=str(replay))

        assert self.files(first) == self.files(second)
        assert self.files(first) == self.files(replay)

    def test_diagonal_batch_passes_the_check(self, tmp_path: Path) -> None:
        run(
            "montecarlo",
            rabbit="linear:2,-1",
            strategy="diagonal:snake",
            cutoff=50,
            trials=3,
            seed=0,
            out=str(tmp_path),
            check=True,
        )

        rows = read_csv(tmp_path / "trials.csv")[1:]
        assert rows == [["0", "10", ""], ["1", "10", ""], ["2", "10", ""]]

    def test_failed_check_exits_6(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        failing = AgreementReport(
            sampled=20,
            passing=0,
            hit_fraction=0.0,
            expected_hit_fraction=1.0,
            hit_fraction_stderr=0.0,
        )
        monkeypatch.setattr(montecarlo, "survival_agreement", lambda *args: failing)

        code = exit_code("montecarlo", out=str(tmp_path), check=True, **self.options)

        assert code == ExitCode.CHECK_FAILED

    def test_horizons_beyond_the_cutoff(self, tmp_path: Path) -> None:
        code = exit_code(
            "montecarlo", out=str(tmp_path), horizons="100,1000", **self.options
        )

        assert code == ExitCode.USAGE

    @pytest.mark.parametrize(
        "overrides",
        [
            {"cutoff": 0},
            {"trials": 0},
            {"workers": 0},
            {"sample_every": 0},
            {"horizons": "0,100"},
        ],
    )
    def test_zero_values_are_rejected(self, tmp_path: Path, overrides: dict) -> None:
        options = {**self.options, **overrides}

        code = exit_code("montecarlo", out=str(tmp_path), **options)

        assert code == ExitCode.USAGE
        assert not (tmp_path / "manifest.json").exists()

    @pytest.mark.django_db
    def test_record_stores_a_run)(self, tmp_path: Path) -> None:
        run("montecarlo", out=str(tmp_path), record=True, **self.options)

        stored = HuntRun.objects.get()
        assert stored.master_seed == "1234"
        assert stored.rabbit_kind == "linear"
        assert stored.strategy_kind == "probabilistic"
        assert stored.trials == 300
        assert stored.manifest["config"]["seed"] == 1234
        assert stored.summary["censored_count"] == stored.censored_count


class TestEnumerateCommand:
    def test_prefix_to_stdout(self) -> None:
        output = run("enumerate", d=2, count=4)

        assert output == "index,x1,x2\n1,0,0\n2,1,0\n3,1,1\n4,0,1\n"

    def test_box_to_file(self, tmp_path: Path) -> None:
        out = tmp_path / "box.csv"

        run("enumerate", d=3, box=1, out=str(out))

        rows = read_csv(out)
        assert rows[0] == ["index", "x1", "x2", "x3"]
        assert len(rows) == 28
        assert (tmp_path / "box.manifest.json").exists()

    def test_needs_count_or_box(self) -> None:
        assert exit_code("enumerate", d=2) == ExitCode.USAGE
        assert exit_code("enumerate", d=5, count=3) == ExitCode.USAGE

    def test_zero_dimension_is_rejected(self) -> None:
        assert exit_code("enumerate", d=0, count=3) == ExitCode.USAGE

    def test_seed_is_recorded_in_the_manifest(self, tmp_path: Path) -> None:
        out = tmp_path / "prefix.csv"

        run("enumerate", d=2, count=4, seed=5, out=str(out))

        manifest = json.loads((tmp_path / "prefix.manifest.json").read_text())
        assert manifest["master_seed"] == 5
        assert manifest["config"] == {"d": 2, "count": 4, "seed": 5}


class TestValidateHCommand:
    def test_klogk_report(self) -> None:
        payload = json.loads(run("validate_h", "klogk", horizon=10_000, check=True))

        assert payload["report"]["accepted"] is True
        assert payload["report"]["divergence_class"] == "diverges"
        assert payload["sandwich_passes"] is True
        assert [row["m"] for row in payload["sandwich"]] == [100, 1000, 10_000]

    def test_k15_fails_the_check(self) -> None:
        code = exit_code("validate_h", "k15", horizon=1000, check=True)

        assert code == ExitCode.CHECK_FAILED

    def test_identity_report_without_check(self) -> None:
        payload = json.loads(run("validate_h", "k", horizon=1000))

        assert payload["report"]["superlinear"] is False
        assert payload["sandwich"] is None

    def test_unknown_envelope(self) -> None:
        assert exit_code("validate_h", "nope") == ExitCode.USAGE

    def test_zero_horizon_is_rejected(self) -> None:
        assert exit_code("validate_h", "klogk", horizon=0) == ExitCode.USAGE

    def test_fresh_seed_is_recorded_in_the_manifest(self, tmp_path: Path) -> None:
        out = tmp_path / "klogk.json"

        run("validate_h", "klogk", horizon=10_000, out=str(out))

        manifest = json.loads((tmp_path / "klogk.manifest.json").read_text())
        assert isinstance(manifest["master_seed"], int)
        assert manifest["config"]["seed"] == manifest["master_seed"]


class TestSurvivalCommand:
    def test_analytic_curve(self) -> None:
        output = run(
            "survival",
            rabbit="linear:5,0",
            strategy="probabilistic:klogk",
            horizon=4,
        )

        lines = output.splitlines()
        assert lines[:4] == ["k,p_k,S_k", "1,0.0,1.0", "2,0.0,1.0", "3,0.0,1.0"]
        assert lines[4].startswith(f"4,{1 / 11!r},")

    def test_diagonal_step_function(self, tmp_path: Path) -> None:
        out = tmp_path / "curve.csv"

        run(
            "survival",
            rabbit="linear:1,1",
            strategy="diagonal:snake",
            horizon=5,
            out=str(out),
        )

        survival = [row[2] for row in read_csv(out)[1:]]
        assert survival == ["1.0", "1.0", "0.0", "0.0", "0.0"]
        summary = json.loads((tmp_path / "curve.summary.json").read_text())
        assert summary["hit_step"] == 3
        assert summary["truncated_mean"] == 3.0
        manifest = json.loads((tmp_path / "curve.manifest.json").read_text())
        assert manifest["outputs"] == [
            "curve.csv",
            "curve.summary.json",
            "curve.manifest.json",
        ]

    def test_zero_horizon_is_rejected(self) -> None:
        code = exit_code(
            "survival",
            rabbit="linear:5,0",
            strategy="probabilistic:klogk",
            horizon=0,
        )

        assert code == ExitCode.USAGE

    def test_seed_is_recorded_in_the_manifest(self, tmp_path: Path) -> None:
        out = tmp_path / "curve.csv"

        run(
            "survival",
            rabbit="linear:5,0",
            strategy="probabilistic:klogk",
            horizon=4,
            seed=11,
            out=str(out),
        )

        manifest = json.loads((tmp_path / "curve.manifest.json").read_text())
        assert manifest["master_seed"] == 11
        assert manifest["config"]["seed"] == 11


def test_read_run_config_accepts_manifests(tmp_path: Path) -> None:
    run(
        "montecarlo",
        rabbit="linear:0,0",
        strategy="probabilistic:klogk",
        cutoff=10,
        trials=2,
        seed=8,
        out=str(tmp_path),
    )

    config = read_run_config(tmp_path / "manifest.json")

    assert config["seed"] == 8
    assert config["horizons"] == [10]
