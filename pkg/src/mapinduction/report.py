"""Figure rendering for experiment reports (headless matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_fraction_figure(summary: dict, path) -> None:
    """Bar chart of median fraction observed per (map, agent kind) with CIs."""
    conditions = sorted(summary)
    labels = [f"{m}\n{k}" for m, k in conditions]
    med = [summary[c]["fraction_observed"]["median"] for c in conditions]
    lo = [summary[c]["fraction_observed"]["ci95"][0] for c in conditions]
    hi = [summary[c]["fraction_observed"]["ci95"][1] for c in conditions]
    fig, ax = plt.subplots(figsize=(1.2 * len(labels) + 2, 4))
    xs = np.arange(len(labels))
    ax.bar(xs, med, color="#4878b0")
    ax.errorbar(
        xs,
        med,
        yerr=np.array([np.subtract(med, lo), np.subtract(hi, med)], dtype=float),
        fmt="none",
        ecolor="black",
        capsize=3,
    )
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("fraction observed")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_steps_figure(summary: dict, path) -> None:
    conditions = sorted(summary)
    labels = [f"{m}\n{k}" for m, k in conditions]
    med = [summary[c]["steps"]["median"] for c in conditions]
    lo = [summary[c]["steps"]["ci95"][0] for c in conditions]
    hi = [summary[c]["steps"]["ci95"][1] for c in conditions]
    fig, ax = plt.subplots(figsize=(1.2 * len(labels) + 2, 4))
    xs = np.arange(len(labels))
    ax.bar(xs, med, color="#b04878")
    ax.errorbar(
        xs,
        med,
        yerr=np.array([np.subtract(med, lo), np.subtract(hi, med)], dtype=float),
        fmt="none",
        ecolor="black",
        capsize=3,
    )
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("steps to termination")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_heatmap_png(counts: np.ndarray, path) -> None:
    """Grayscale visitation image, one pixel block per cell."""
    arr = counts.astype(float)
    if arr.max() > 0:
        arr = arr / arr.max()
    fig, ax = plt.subplots(figsize=(max(2, counts.shape[1] / 4), max(2, counts.shape[0] / 4)))
    ax.imshow(arr, cmap="gray", interpolation="nearest", vmin=0, vmax=1)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout(pad=0.1)
    fig.savefig(path, dpi=100)
    plt.close(fig)
