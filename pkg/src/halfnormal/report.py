"""Serialization of experiment results: CSV tables and JSON bundles.

The CSV mirrors the layout of the corresponding study table (identifier
columns plus mean and squared-error columns); the JSON bundle carries the
full replicate vectors, exclusions, and box-plot summaries, and is the
interface consumed by the figure-rendering package.  Numbers are written
with 17 significant digits, so both formats round-trip doubles exactly.

The JSON schema (version 1) is documented in ``docs/report_schema.json``.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError, HalfNormalError
from .simharness import EstimateReport, SimulationConfig

__all__ = [
    "SCHEMA_VERSION",
    "ReportIOError",
    "ReportBundle",
    "build_bundle",
    "write_csv",
    "write_json",
    "read_json",
]

SCHEMA_VERSION = 1

_TOOL_NAME = "halfnormal"
_TOOL_VERSION = "0.1.0"

# Identifier columns per experiment; every table then carries mean and the
# error columns that make sense for it.
_CSV_COLUMNS = {
    "table1": ("epsilon", "m", "mean", "mse"),
    "table2": ("epsilon", "m", "mean", "mse", "variance"),
    "table3": ("epsilon", "n", "mean", "mse"),
    "table4": ("estimator", "epsilon", "n", "mean", "mse"),
    "table5": ("n", "estimator", "mean", "mse"),
    "custom": ("estimator", "n", "mean", "mse", "variance"),
}


class ReportIOError(HalfNormalError):
    """Filesystem failure while writing or reading a report."""


@dataclass(frozen=True)
class ReportBundle:
    """Metadata plus the per-cell reports of one experiment run."""

    metadata: dict
    cells: tuple[EstimateReport, ...]

    def experiment(self) -> str:
        if not self.cells:
            return str(self.metadata.get("experiment", "custom"))
        return self.cells[0].experiment


def _timestamp() -> str:
    """ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible runs."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def build_bundle(
    config: SimulationConfig,
    cells: Iterable[EstimateReport],
    notes: Iterable[str] = (),
) -> ReportBundle:
    metadata = {
        "tool": _TOOL_NAME,
        "version": _TOOL_VERSION,
        "experiment": config.experiment.value,
        "seed": config.seed,
        "timestamp": _timestamp(),
        # The worker count is deliberately not echoed: it cannot change the
        # numbers, and reports produced at different parallelism must be
        # byte-identical.
        "config": {
            "replications": config.reps,
            "n_values": list(config.ns),
            "m_values": list(config.ms),
            "epsilon_values": list(config.epsilons),
            "xi": config.true_params.xi,
            "eta": config.true_params.eta,
            "cov": config.cov,
            "max_draws": config.max_draws,
        },
        "notes": list(notes),
    }
    return ReportBundle(metadata, tuple(cells))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(bundle: ReportBundle, path: str | os.PathLike) -> None:
    """Write the experiment's table as CSV (UTF-8, LF, full precision)."""
    columns = _CSV_COLUMNS[bundle.experiment()]
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for cell in bundle.cells:
                writer.writerow([_fmt(getattr(cell, name)) for name in columns])
    except OSError as exc:
        raise ReportIOError(f"cannot write CSV report to {path!r}: {exc}") from exc


def _cell_to_json(cell: EstimateReport) -> dict:
    box = cell.boxplot
    return {
        "experiment": cell.experiment,
        "estimator": cell.estimator,
        "n": cell.n,
        "m": cell.m,
        "epsilon": cell.epsilon,
        "truth": cell.truth,
        "mean": cell.mean,
        "mse": cell.mse,
        "variance": cell.variance,
        "boxplot": {
            "minimum": box.minimum,
            "q1": box.q1,
            "median": box.median,
            "q3": box.q3,
            "maximum": box.maximum,
            "mean": box.mean,
        },
        "excluded": [[index, reason] for index, reason in cell.excluded],
        "replicate_values": list(cell.replicate_values),
    }


def write_json(bundle: ReportBundle, path: str | os.PathLike) -> None:
    """Write the full bundle (metadata, cells, replicates) as JSON."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "metadata": bundle.metadata,
        "cells": [_cell_to_json(cell) for cell in bundle.cells],
    }
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(payload, handle, indent=1)
            handle.write("\n")
    except OSError as exc:
        raise ReportIOError(f"cannot write JSON report to {path!r}: {exc}") from exc


def _cell_from_json(data: dict) -> EstimateReport:
    return EstimateReport(
        experiment=data["experiment"],
        estimator=data["estimator"],
        n=data["n"],
        m=data["m"],
        epsilon=data["epsilon"],
        truth=data["truth"],
        replicate_values=tuple(data["replicate_values"]),
        excluded=tuple((int(i), str(r)) for i, r in data["excluded"]),
    )


def read_json(path: str | os.PathLike) -> ReportBundle:
    """Load a bundle written by :func:`write_json` (re-aggregating cells)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise ReportIOError(f"cannot read JSON report from {path!r}: {exc}") from exc
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DomainError(
            f"unsupported report schema version {version!r} in {path!r}"
        )
    cells = tuple(_cell_from_json(c) for c in payload["cells"])
    return ReportBundle(payload["metadata"], cells)
