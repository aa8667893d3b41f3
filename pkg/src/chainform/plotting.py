"""Figure rendering for the report path of the CLI.

CSV files remain the primary artifact; these figures are a convenience
rendered next to them."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_chain_figure(configs, labels, path, title=None):
    """Plot one or more chain configurations as polylines with markers."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for cfg, label in zip(configs, labels):
        p = cfg.positions
        ax.plot(p[:, 0], p[:, 1], marker="o", markersize=3, label=label)
        ax.plot(p[0, 0], p[0, 1], marker="s", color="black", markersize=5)
        ax.plot(p[-1, 0], p[-1, 1], marker="s", color="black", markersize=5)
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def save_series_figure(t, series, path, title=None, logy=False):
    """Plot named time series (dict label -> values) against t."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, values in series.items():
        ax.plot(t, values, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
