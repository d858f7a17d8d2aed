"""Report figures rendered next to the delimited outputs.

The sweep report gets error-vs-size and stats-vs-size curves; the stats
report gets per-type degree histograms. Everything renders through the
Agg backend straight to files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .netmetrics import GraphStats, SweepRow


def _mean_by_size(rows: Sequence[SweepRow], getter) -> tuple[list[int], list[float]]:
    by_n: dict[int, list[float]] = {}
    for row in rows:
        if row.status != "ok":
            continue
        value = getter(row)
        if value is None:
            continue
        by_n.setdefault(row.n, []).append(float(value))
    sizes = sorted(by_n)
    return sizes, [float(np.mean(by_n[n])) for n in sizes]


def plot_sweep_errors(
    rows: Sequence[SweepRow], type_names: Sequence[str], path: str | Path
) -> Path:
    """Matching error per type and distribution error against size."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for t in type_names:
        sizes, values = _mean_by_size(rows, lambda r, t=t: r.matching_errors.get(t))
        if sizes:
            ax.plot(sizes, values, marker="o", label=f"matching: {t}")
    sizes, values = _mean_by_size(rows, lambda r: r.distribution_error)
    if sizes:
        ax.plot(sizes, values, marker="s", linestyle="--", color="black",
                label="distribution")
    ax.set_xscale("log")
    ax.set_xlabel("population size")
    ax.set_ylabel("error rate")
    ax.set_title("Generation errors vs population size")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep_stats(rows: Sequence[SweepRow], path: str | Path) -> Path:
    """Density, transitivity, path length and mean degree against size."""
    path = Path(path)
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = [
        ("density", lambda r: r.stats.density if r.stats else None),
        ("transitivity", lambda r: r.stats.transitivity if r.stats else None),
        ("avg path length", lambda r: r.stats.avg_path_length if r.stats else None),
        ("mean degree", lambda r: r.stats.mean_degree if r.stats else None),
    ]
    for ax, (label, getter) in zip(axes.flat, panels):
        sizes, values = _mean_by_size(rows, getter)
        if sizes:
            ax.plot(sizes, values, marker="o")
        ax.set_xscale("log")
        ax.set_title(label, fontsize=10)
        ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("population size")
    fig.suptitle("Network statistics vs population size")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_degree_histograms(stats: GraphStats, path: str | Path) -> Path:
    """Overall and per-type degree histograms."""
    path = Path(path)
    per_type = stats.per_type_degree_hist
    count = 1 + len(per_type)
    cols = min(3, count)
    rows_n = (count + cols - 1) // cols
    fig, axes = plt.subplots(rows_n, cols, figsize=(3.2 * cols, 2.6 * rows_n),
                             squeeze=False)
    flat = axes.flat
    series = [("all types", stats.degree_hist)]
    series += sorted(per_type.items())
    for ax, (label, hist) in zip(flat, series):
        degrees = sorted(hist)
        ax.bar(degrees, [hist[d] for d in degrees], width=0.85)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("degree", fontsize=8)
    for ax in list(flat)[len(series):]:
        ax.axis("off")
    fig.suptitle(f"Degree distributions (n={stats.n})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
