"""Static figures for metric reports (rendered off-screen to image files)."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import MetricReport  # noqa: E402

OVERLAP_FIELDS = ("po", "init_po")
DISTANCE_FIELDS = ("iped", "oped")


def _column(reports, name):
    return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in reports], float)


def plot_reports(reports: Sequence[MetricReport], path, title: str | None = None, dpi: int = 120):
    """Two panels: overlap ratios and phonemic distances, one bar group per text.

    Undefined metrics are left as gaps. Returns the written path.
    """
    if not reports:
        raise ValueError("nothing to plot")
    labels = [str(r.id) for r in reports]
    x = np.arange(len(reports))
    width = 0.38
    fig, axes = plt.subplots(2, 1, figsize=(max(6.0, 0.5 * len(reports) + 3), 6), sharex=True)
    for ax, names, ylabel in ((axes[0], OVERLAP_FIELDS, "overlap ratio"),
                              (axes[1], DISTANCE_FIELDS, "mean distance")):
        for i, name in enumerate(names):
            ax.bar(x + (i - 0.5) * width, _column(reports, name), width, label=name)
        ax.set_ylabel(ylabel)
        ax.legend(loc="upper right", fontsize="small")
        ax.grid(axis="y", alpha=0.3)
    axes[0].set_ylim(0, 1.05)
    axes[1].set_xticks(x)
    axes[1].set_xticklabels(labels, rotation=45 if len(labels) > 8 else 0, ha="right" if len(labels) > 8 else "center")
    axes[1].set_xlabel("text")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
