"""Matplotlib rendering of bundle box plots.

Everything drawn comes straight from the stored summaries: box edges at
the stored quartiles, whiskers at the stored extremes, and a dotted red
line at the stored mean.  Rendering is a pure function of the bundle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bundle import Bundle, Cell, load_bundle


@dataclass(frozen=True)
class FigureSpec:
    input_path: str | Path
    output_path: str | Path
    title_template: str = "{experiment}  panel {panel}"
    selection: dict = field(default_factory=dict)
    dpi: int = 150


def _box_stats(cell: Cell) -> dict:
    box = cell.boxplot
    return {
        "med": box["median"],
        "q1": box["q1"],
        "q3": box["q3"],
        "whislo": box["minimum"],
        "whishi": box["maximum"],
        "mean": box["mean"],
        "label": str(cell.group_value),
        "fliers": [],
    }


def render_boxplots(spec: FigureSpec):
    """Render one panel per cell group and write the image file.

    Returns the matplotlib figure (tests introspect the artists; the file
    written to ``spec.output_path`` is the product).
    """
    bundle = load_bundle(spec.input_path)
    if spec.selection:
        cells = bundle.select(**spec.selection)
        bundle = Bundle(bundle.metadata, cells)
    keys = bundle.panel_keys()
    fig, axes = plt.subplots(
        1, len(keys), figsize=(4.0 * len(keys), 4.0), squeeze=False, sharey=True
    )
    experiment = bundle.cells[0].experiment if bundle.cells else "report"
    for ax, key in zip(axes[0], keys):
        cells = sorted(bundle.panel_cells(key), key=lambda c: c.group_value)
        stats = [_box_stats(cell) for cell in cells]
        ax.bxp(
            stats,
            showmeans=True,
            meanline=True,
            showfliers=False,
            meanprops={"linestyle": ":", "color": "red"},
        )
        ax.set_title(spec.title_template.format(experiment=experiment, panel=key))
        ax.set_xlabel("m" if cells[0].m is not None else "n")
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=spec.dpi)
    return fig
