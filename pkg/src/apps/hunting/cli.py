"""Plumbing shared by the hunting management commands."""

from __future__ import annotations

import enum
import json
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import environ
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError, CommandParser

from apps.common.serializers import render_json

from .serializers import RunManifestSerializer
from .strategies import fresh_seed, require_seed

logger = logging.getLogger(__name__)


class ExitCode(enum.IntEnum):
    OK = 0
    USAGE = 2
    CENSORED = 3
    ARITHMETIC = 4
    UNWRITABLE = 5
    CHECK_FAILED = 6


# Keys a run config file may set, with their casts.
RUN_CONFIG_SCHEMA: dict[str, tuple[type, None]] = {
    "RABBIT": (str, None),
    "STRATEGY": (str, None),
    "CUTOFF": (int, None),
    "TRIALS": (int, None),
    "SEED": (int, None),
    "HORIZON": (int, None),
    "HORIZONS": (list, None),
    "OUT": (str, None),
    "WORKERS": (int, None),
}


def _error_text(exc: ValidationError) -> str:
    if hasattr(exc, "error_dict"):
        return "; ".join(
            f"{key}: {' '.join(messages)}" for key, messages in exc.message_dict.items()
        )
    return " ".join(exc.messages)


def _read_env_file(path: Path) -> dict[str, Any]:
    # A private ENVIRON keeps file values out of os.environ.
    scoped = type("RunConfigEnv", (environ.Env,), {"ENVIRON": {}})
    reader = scoped(**RUN_CONFIG_SCHEMA)
    scoped.read_env(str(path))
    unknown = sorted(set(scoped.ENVIRON) - set(RUN_CONFIG_SCHEMA))
    if unknown:
        raise ValidationError({"config": f"Unknown keys: {', '.join(unknown)}."})
    values: dict[str, Any] = {}
    for key in RUN_CONFIG_SCHEMA:
        if key not in scoped.ENVIRON:
            continue
        try:
            values[key.lower()] = reader(key)
        except ValueError as exc:
            raise ValidationError({key.lower(): str(exc)}) from exc
    return values


def _read_manifest(path: Path) -> dict[str, Any]:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError({"config": f"{path} is not valid JSON."}) from exc
    serializer = RunManifestSerializer(data=payload)
    if not serializer.is_valid():
        raise ValidationError({"config": f"{path} is not a run manifest."})
    return dict(serializer.validated_data["config"])


def read_run_config(path: str | Path) -> dict[str, Any]:
    """Load a ``KEY=value`` run file, or the ``config`` block of a manifest."""

    path = Path(path)
    if not path.is_file():
        raise ValidationError({"config": f"No config file at {path}."})
    if path.suffix == ".json":
        return _read_manifest(path)
    return _read_env_file(path)


def merge_options(
    file_values: Mapping[str, Any], options: Mapping[str, Any]
) -> dict[str, Any]:
    """Command-line values win over file values; ``None`` means "not given"."""

    merged = dict(file_values)
    merged.update({key: value for key, value in options.items() if value is not None})
    return merged


def parse_int_list(value: object, field_name: str) -> list[int]:
    if value is None:
        return []
    if isinstance(value, str):
        items = value.split(",")
    else:
        items = list(value)  # type: ignore[call-overload]
    try:
        return [int(str(item).strip()) for item in items if str(item).strip()]
    except ValueError as exc:
        raise ValidationError(
            {field_name: "Expected comma-separated integers."}
        ) from exc


@dataclass
class RunManifest:
    """Resolved configuration of a command run."""

    command: str
    master_seed: int | None
    config: dict[str, Any]
    outputs: list[str] = field(default_factory=list)
    version: str = field(default_factory=lambda: settings.RABBIT_HUNT_VERSION)

    def to_json(self) -> bytes:
        return render_json(RunManifestSerializer(self).data)

    def to_dict(self) -> dict[str, Any]:
        return dict(RunManifestSerializer(self).data)


class HuntingCommand(BaseCommand):
    """Base command: config merging, exit codes and output helpers."""

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument(
            "--config", help="KEY=value run file or a manifest.json to replay."
        )

    def add_seed_argument(self, parser: CommandParser) -> None:
        parser.add_argument(
            "--seed", type=int, help="Master seed; a fresh one is drawn if omitted."
        )

    def handle(self, *args, **options):  # noqa: ANN002, ANN003, ANN201
        try:
            file_values = (
                read_run_config(options["config"]) if options.get("config") else {}
            )
            return self.run(merge_options(file_values, options))
        except ValidationError as exc:
            raise CommandError(_error_text(exc), returncode=ExitCode.USAGE) from exc
        except ArithmeticError as exc:
            raise CommandError(
                f"Arithmetic error: {exc}", returncode=ExitCode.ARITHMETIC
            ) from exc

    def run(self, options: dict[str, Any]) -> None:
        raise NotImplementedError

    # Helpers ----------------------------------------------------------

    def resolve_seed(self, options: Mapping[str, Any]) -> int:
        seed = options.get("seed")
        if seed is None:
            seed = fresh_seed()
            logger.info("No seed given; drew %d", seed)
        return require_seed(seed)

    def option(
        self,
        options: Mapping[str, Any],
        key: str,
        default: Any,  # noqa: ANN401
    ) -> Any:  # noqa: ANN401
        """``options[key]`` unless it was not given; an explicit 0 is kept."""

        value = options.get(key)
        return default if value is None else value

    def require(self, options: Mapping[str, Any], key: str) -> Any:  # noqa: ANN401
        value = options.get(key)
        if value is None:
            raise ValidationError({key: f"--{key} is required."})
        return value

    def status(self, message: str) -> None:
        """User-facing progress goes to stderr; stdout carries results."""

        self.stderr.write(message, style_func=self.style.SUCCESS)

    def prepare_directory(self, directory: str | Path) -> Path:
        path = Path(directory)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CommandError(
                f"Cannot create {path}: {exc}", returncode=ExitCode.UNWRITABLE
            ) from exc
        return path

    def write_bytes(self, path: Path, payload: bytes) -> None:
        try:
            path.write_bytes(payload)
        except OSError as exc:
            raise CommandError(
                f"Cannot write {path}: {exc}", returncode=ExitCode.UNWRITABLE
            ) from exc

    def write_text(self, path: Path, render: Any) -> None:  # noqa: ANN401
        """Write the text produced by ``render(stream)``."""

        try:
            with path.open("w", encoding="utf-8", newline="") as stream:
                render(stream)
        except OSError as exc:
            raise CommandError(
                f"Cannot write {path}: {exc}", returncode=ExitCode.UNWRITABLE
            ) from exc

    def write_sidecar(self, out: Path, manifest: RunManifest, *extra: str) -> Path:
        """``<stem>.manifest.json`` next to a single output file."""

        sidecar = out.with_name(f"{out.stem}.manifest.json")
        manifest.outputs = [out.name, *extra, sidecar.name]
        self.write_bytes(sidecar, manifest.to_json())
        return sidecar

    def emit(self, payload: bytes) -> None:
        self.stdout.write(payload.decode("utf-8"), ending="")


def decade_horizons(cutoff: int) -> list[int]:
    marks = [10**e for e in range(1, 19) if 10**e < cutoff]
    return [*marks, cutoff]


def ordered_config(config: Mapping[str, Any], keys: Iterable[str]) -> dict[str, Any]:
    return {key: config[key] for key in keys if config.get(key) is not None}
