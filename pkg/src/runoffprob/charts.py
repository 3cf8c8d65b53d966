"""SVG line charts rendering the report tables (convenience output)."""

from __future__ import annotations

import datetime as dt
from typing import Mapping, Sequence

LEGEND_FLOOR = 0.005  # series peaking below this stay unlabeled


def write_series_chart(
    path,
    series: Mapping[str, Sequence[tuple[dt.date, float]]],
    title: str,
    ylabel: str,
) -> None:
    """One line per series over poll dates, written as an SVG file."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name in sorted(series):
        points = sorted(series[name])
        dates = [d for d, _ in points]
        values = [v for _, v in points]
        label = name if max(values, default=0.0) >= LEGEND_FLOOR else None
        ax.plot(dates, values, marker="o", markersize=3, label=label)
    ax.set_ylim(-0.02, 1.02)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="center left", bbox_to_anchor=(1.0, 0.5), fontsize="small")
    fig.autofmt_xdate()
    fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
