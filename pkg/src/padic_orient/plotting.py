"""Valuation plots for reports (matplotlib, file output only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_valuations"]


def plot_valuations(series: dict, path: str, title: str = "", xlabel: str = "r",
                    ylabel: str = "p-adic valuation", cap: int | None = None):
    """One line per named sequence of valuations; `cap` draws the precision ceiling."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, vals in sorted(series.items()):
        xs = list(range(len(vals)))
        ys = [cap if (cap is not None and v > cap) else v for v in vals]
        ax.plot(xs, ys, marker="o", label=str(name))
    if cap is not None:
        ax.axhline(cap, color="grey", linestyle="--", linewidth=0.8, label=f"precision M={cap}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path
