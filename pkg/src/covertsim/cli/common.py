"""Plumbing shared by the CSV-producing sub-commands.

Every command builds a table ``(header, rows)`` from an
:class:`ExperimentConfig`; this module resolves settings (defaults < config
file < flags), applies ``--sweep``, writes the CSV and maps failures to exit
codes: 2 for invalid input, 3 for internal numerical failure.
"""

from __future__ import annotations

import csv
import logging
import sys
from collections.abc import Callable, Iterable, Sequence
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, TextIO

from rich.console import Console

from ..config import Settings, build_settings, load_config_file
from ..models import (
    DegenerateHypothesisError,
    ExperimentConfig,
    NumericalError,
    ParameterError,
    SystemParams,
    require_valid,
)

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

Row = list[Any]
Table = tuple[list[str], list[Row]]
TableBuilder = Callable[[ExperimentConfig, SystemParams], Table]


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------


def settings_from_args(args) -> Settings:
    file_values = load_config_file(getattr(args, "config", None))
    overrides = {name: getattr(args, name) for name in Settings.model_fields if hasattr(args, name)}
    return build_settings(file_values, overrides)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def format_cell(value: Any) -> str:
    """Floats with 17 significant digits (round-trip exact)."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@contextmanager
def open_output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    dest = Path(path)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with dest.open("w", encoding="utf-8", newline="") as fh:
        yield fh


def write_table(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open_output(path) as stream:
        write_table(stream, header, rows)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def sweep_table(experiment: ExperimentConfig, build: TableBuilder) -> Table:
    """Run *build* once, or once per swept value with a leading column."""
    if experiment.sweep is None:
        return build(experiment, require_valid(experiment.params))
    header: list[str] = []
    rows: list[Row] = []
    for value, params in experiment.sweep.apply(experiment.params):
        sub_header, sub_rows = build(experiment, require_valid(params))
        header = [experiment.sweep.name, *sub_header]
        rows.extend([value, *row] for row in sub_rows)
    return header, rows


def report_invalid(errors: Sequence[str]) -> None:
    console.print("[red]Invalid input:[/red]")
    for message in errors:
        console.print(f"  [red]•[/red] {message}", markup=True, highlight=False)


def execute(
    args,
    command: str,
    build: Callable[[ExperimentConfig], Table],
    summarize: Callable[[ExperimentConfig, Table], None] | None = None,
) -> int:
    """Resolve settings, build the table, write the CSV; returns the exit code."""
    try:
        experiment = settings_from_args(args).to_experiment(command)
        header, rows = build(experiment)
        write_csv(experiment.output_path, header, rows)
    except ParameterError as exc:
        report_invalid(exc.errors)
        return EXIT_INVALID
    except DegenerateHypothesisError as exc:
        report_invalid([f"p_ab: {exc}"])
        return EXIT_INVALID
    except NumericalError as exc:
        logger.exception("%s: numerical failure", command)
        console.print(f"[red]Numerical failure:[/red] {exc}", highlight=False)
        return EXIT_NUMERICAL
    logger.info("%s: wrote %d rows to %s", command, len(rows), experiment.output_path)
    if summarize is not None:
        summarize(experiment, (header, rows))
    return EXIT_OK
