"""Matplotlib renderers for the CLI report outputs.

Every function draws one figure and writes it to a file; the numeric data
these plots show is always emitted alongside as CSV/JSON, so the images are
a convenience, not the interface.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dataset import AndrewsCurve
from .metrics import RocCurve

_CLASS_COLORS = {0: "tab:blue", 1: "tab:red"}
_CLASS_NAMES = {0: "no fire outbreak", 1: "fire outbreak"}


def save_roc_figure(curve: RocCurve, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = [p[0] for p in curve.points]
    ys = [p[1] for p in curve.points]
    ax.plot(xs, ys, marker="o", markersize=3, color="tab:red", label=f"AUC = {curve.auc:.4f}")
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", linewidth=1)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title("ROC curve")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_lag_figure(
    pairs: Sequence[tuple[float, float]], path: str | Path, series_name: str, lag: int
) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter([p[0] for p in pairs], [p[1] for p in pairs], s=12, color="tab:blue", alpha=0.7)
    ax.set_xlabel(f"{series_name}(t)")
    ax.set_ylabel(f"{series_name}(t + {lag})")
    ax.set_title(f"Lag plot of {series_name}, lag {lag}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(
    matrix: np.ndarray, names: Sequence[str], path: str | Path
) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 5))
    im = ax.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="coolwarm")
    ax.set_xticks(range(len(names)), labels=names)
    ax.set_yticks(range(len(names)), labels=names)
    for i in range(len(names)):
        for j in range(len(names)):
            value = matrix[i, j]
            text = "n/a" if math.isnan(value) else f"{value:.2f}"
            ax.text(j, i, text, ha="center", va="center", fontsize=9)
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title("Feature / label correlation")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_andrews_figure(curves: Sequence[AndrewsCurve], path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 5))
    seen = set()
    for curve in curves:
        label = _CLASS_NAMES[curve.label] if curve.label not in seen else None
        seen.add(curve.label)
        ax.plot(
            curve.t,
            curve.values,
            color=_CLASS_COLORS[curve.label],
            alpha=0.5,
            linewidth=0.8,
            label=label,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)")
    ax.set_title("Andrews curves")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
