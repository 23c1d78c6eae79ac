"""Static SVG line charts.

Figures are built on a bare ``Figure`` (no pyplot state) and saved with a
fixed hash salt and no date stamp, so identical data gives identical files.
"""

from __future__ import annotations

import matplotlib
from matplotlib.figure import Figure

_RC = {"svg.hashsalt": "lloydsbm", "svg.fonttype": "path"}


def plot_series(path, series: dict, xlabel: str, ylabel: str, title: str = "",
                errors: dict | None = None, logy: bool = False) -> None:
    """One line per entry of ``series`` (``name -> (x, y)``); optional error bars."""
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for name, (x, y) in series.items():
            err = None if errors is None else errors.get(name)
            ax.errorbar(x, y, yerr=err, marker="o", markersize=4, capsize=3, label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if logy:
            ax.set_yscale("log")
        ax.grid(alpha=0.3)
        if len(series) > 1:
            ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
