import logging

import matplotlib
matplotlib.use("agg")
from matplotlib.figure import Figure

from dhtguard.errors import UsageError
from dhtguard.results import PathLike
from dhtguard.sweep import SweepResult


log = logging.getLogger(__name__)

RATIO_LINE_ID = "sweep-ratio"
# The SVG backend renders at 72 dpi; building the figure at the same dpi keeps
# its transforms valid for the written coordinates.
SVG_DPI = 72


def ratio_figure(result: SweepResult) -> Figure:
    """Ratio-to-zero-guard error (percent, log scale) against guard width."""
    if len(result.rows) == 0:
        raise UsageError("Cannot plot an empty sweep")

    x = [row.guard for row in result.rows]
    y = [row.ratio_percent for row in result.rows]

    fig = Figure(figsize=(6.4, 4.8), dpi=SVG_DPI)
    ax = fig.add_subplot()
    ax.set_title(f"{result.label}, N = {result.width}")
    ax.set_xlabel("guard band m (points per side)")
    ax.set_ylabel("RMS error, % of error without guard band")
    ax.set_yscale("log", nonpositive="mask")
    ax.grid(True, which="both", linewidth=0.3)

    (line,) = ax.plot(x, y, marker="o", markersize=3, linewidth=1)
    line.set_gid(RATIO_LINE_ID)
    return fig


def emit_svg(result: SweepResult, path: PathLike) -> Figure:
    fig = ratio_figure(result)
    with matplotlib.rc_context({"svg.hashsalt": "dhtguard", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    log.info(f"Wrote plot {path}")
    return fig
