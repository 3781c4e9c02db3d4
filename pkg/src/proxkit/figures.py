"""Matplotlib renderings written next to the delimited report outputs.

Zone colors follow the floor-grid scheme coders see on screen:
intimate red, personal orange, social purple, off-screen grey.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import ZONE_ORDER, Zone
from .metrics import MetricsRow
from .triangulate import CorrelationReport, TriangulatedTable

ZONE_COLORS = {
    Zone.INTIMATE: "#d62728",
    Zone.PERSONAL: "#ff7f0e",
    Zone.SOCIAL: "#9467bd",
    Zone.OFF_SCREEN: "#999999",
}
_ZONE_LABELS = [z.code for z in ZONE_ORDER]


def zone_share_figure(rows: Sequence[MetricsRow], out_path: Path) -> Path:
    """Stacked per-track bars of on-grid shares, off-screen fraction alongside."""
    labels = [f"{r.session_id}/{r.track_id}" if len({x.session_id for x in rows}) > 1 else r.track_id
              for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(rows) + 2.0), 4.0))
    bottom = np.zeros(len(rows))
    for zone, attr in ((Zone.INTIMATE, "share_intimate"),
                       (Zone.PERSONAL, "share_personal"),
                       (Zone.SOCIAL, "share_social")):
        values = np.array([getattr(r, attr) for r in rows])
        ax.bar(x, values, bottom=bottom, width=0.55, color=ZONE_COLORS[zone], label=zone.code)
        bottom += values
    offscreen = np.array([r.offscreen_fraction for r in rows])
    ax.bar(x + 0.3, offscreen, width=0.15, color=ZONE_COLORS[Zone.OFF_SCREEN], label="x (of total)")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylabel("time share")
    ax.set_ylim(0, 1.05)
    ax.legend(ncol=4, fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def matrix_heatmap(matrix: Sequence[Sequence[int]], out_path: Path, title: str = "") -> Path:
    """4x4 count heatmap in canonical zone order (rows: from / coder A)."""
    data = np.array(matrix, dtype=float)
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    im = ax.imshow(data, cmap="Blues")
    ax.set_xticks(range(4))
    ax.set_yticks(range(4))
    ax.set_xticklabels(_ZONE_LABELS)
    ax.set_yticklabels(_ZONE_LABELS)
    for i in range(4):
        for j in range(4):
            ax.text(j, i, f"{int(data[i, j])}", ha="center", va="center",
                    color="white" if data[i, j] > data.max() / 2 else "black", fontsize=9)
    if title:
        ax.set_title(title, fontsize=10)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def sum_matrices(matrices: Iterable[Sequence[Sequence[int]]]):
    total = np.zeros((4, 4), dtype=int)
    for m in matrices:
        total += np.array(m, dtype=int)
    return total


def correlation_scatter_figures(
    table: TriangulatedTable, report: CorrelationReport, out_dir: Path, stem: str
) -> list[Path]:
    """One scatter per reported pair, annotated with r and rho."""
    out_dir = Path(out_dir)
    paths = []
    for row in report.rows:
        xs, ys = [], []
        for x, y in zip(table.column(row.variable_x), table.column(row.variable_y)):
            if x is not None and y is not None:
                xs.append(x)
                ys.append(y)
        fig, ax = plt.subplots(figsize=(4.2, 3.8))
        ax.scatter(xs, ys, s=14, alpha=0.6, color="#1f77b4", edgecolors="none")
        ax.set_xlabel(row.variable_x)
        ax.set_ylabel(row.variable_y)
        ax.set_title(f"r={row.pearson_r:.3f}  rho={row.spearman_rho:.3f}  n={row.n}", fontsize=9)
        fig.tight_layout()
        path = out_dir / f"{stem}_{row.variable_x}_vs_{row.variable_y}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
