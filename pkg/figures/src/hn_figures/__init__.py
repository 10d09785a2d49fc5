"""Box-plot rendering for halfnormal report bundles.

Consumes the JSON report schema (version 1) produced by the estimation
package and renders the box-plot figures for each study: one panel per
cell group, whiskers taken from the stored five-number summaries, and the
cell mean drawn as a dotted red line.  No statistic is recomputed here;
the numeric truth stays in the bundle.
"""

from .bundle import Bundle, Cell, MissingCellError, load_bundle
from .render import FigureSpec, render_boxplots

__version__ = "0.1.0"

__all__ = [
    "Bundle",
    "Cell",
    "MissingCellError",
    "load_bundle",
    "FigureSpec",
    "render_boxplots",
]
