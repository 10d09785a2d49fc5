"""Loading and slicing of report bundles (JSON schema version 1)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

SUPPORTED_SCHEMA = 1


class BundleError(Exception):
    """The input file is not a usable report bundle."""


class MissingCellError(BundleError):
    """A cell selector matched nothing in the bundle."""


@dataclass(frozen=True)
class Cell:
    experiment: str
    estimator: str
    n: int | None
    m: int | None
    epsilon: float | None
    mean: float
    boxplot: dict
    replicate_values: tuple[float, ...]

    @property
    def group_value(self) -> int:
        """The within-panel position key: the acceptance target m for the
        conditional-expectation studies, the sample size n otherwise."""
        value = self.m if self.m is not None else self.n
        if value is None:
            raise BundleError(
                f"cell {self.estimator!r} carries neither m nor n; cannot place it"
            )
        return int(value)


@dataclass(frozen=True)
class Bundle:
    metadata: dict
    cells: tuple[Cell, ...]

    def select(self, **filters) -> tuple[Cell, ...]:
        """Cells matching all given (field, value) filters.

        Raises ``MissingCellError`` naming the selector when nothing
        matches.
        """
        chosen = [
            cell
            for cell in self.cells
            if all(getattr(cell, key) == value for key, value in filters.items())
        ]
        if not chosen:
            raise MissingCellError(f"no cell matches selector {filters!r}")
        return tuple(chosen)

    def panel_keys(self) -> list:
        """Panel grouping: by bandwidth when present, else by estimator."""
        if any(cell.epsilon is not None for cell in self.cells):
            keys = []
            for cell in self.cells:
                if cell.epsilon not in keys:
                    keys.append(cell.epsilon)
            return keys
        keys = []
        for cell in self.cells:
            if cell.estimator not in keys:
                keys.append(cell.estimator)
        return keys

    def panel_cells(self, key) -> tuple[Cell, ...]:
        if any(cell.epsilon is not None for cell in self.cells):
            return self.select(epsilon=key)
        return self.select(estimator=key)


_REQUIRED_BOX_KEYS = {"minimum", "q1", "median", "q3", "maximum", "mean"}


def load_bundle(path: str | Path) -> Bundle:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise BundleError(f"cannot read bundle {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle {path!r} is not valid JSON: {exc}") from exc
    if payload.get("schema_version") != SUPPORTED_SCHEMA:
        raise BundleError(
            f"bundle {path!r} has schema_version "
            f"{payload.get('schema_version')!r}; supported: {SUPPORTED_SCHEMA}"
        )
    cells = []
    for raw in payload.get("cells", []):
        box = raw.get("boxplot", {})
        if not _REQUIRED_BOX_KEYS.issubset(box):
            raise BundleError(
                f"cell {raw.get('estimator')!r} lacks a five-number summary"
            )
        cells.append(
            Cell(
                experiment=str(raw["experiment"]),
                estimator=str(raw["estimator"]),
                n=raw.get("n"),
                m=raw.get("m"),
                epsilon=raw.get("epsilon"),
                mean=float(raw["mean"]),
                boxplot=box,
                replicate_values=tuple(raw.get("replicate_values", ())),
            )
        )
    return Bundle(payload.get("metadata", {}), tuple(cells))
