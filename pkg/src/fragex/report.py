"""Static report rendering: the cluster strip and the dimension value
table as figures, written next to the delimited export.

The encoding mirrors the web view: one hue per dimension, brightness
falling from rank 1 to rank 5, curved connectors between cells that hold
the same value in two columns, commit counts in the bottom-right corner
of each cluster rectangle.
"""

from __future__ import annotations

import colorsys
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import PathPatch, Rectangle
from matplotlib.path import Path

DIMENSION_HUES = {
    "author": 210 / 360,
    "keyword": 270 / 360,
    "file": 130 / 360,
    "directory": 30 / 360,
}

_SATURATION = 0.55


def brightness_for_rank(rank: int) -> float:
    """Five steps, strictly decreasing from rank 1 to rank 5."""
    return 0.72 - 0.09 * (rank - 1)


def cell_color(dimension: str, rank: int) -> tuple[float, float, float]:
    return colorsys.hls_to_rgb(DIMENSION_HUES[dimension],
                               brightness_for_rank(rank), _SATURATION)


def _shorten(text: str, width: int = 22) -> str:
    return text if len(text) <= width else text[: width - 1] + "…"


def render_cluster_strip(scope_payload: dict, path: str) -> None:
    clusters = scope_payload["clusters"]
    matched = set(scope_payload.get("matched_nodes", []))
    fig, ax = plt.subplots(figsize=(max(4, 1.4 * len(clusters)), 1.8))
    for i, cluster in enumerate(clusters):
        first, last = cluster["node_range"]
        hot = any(first <= index <= last for index in matched)
        ax.add_patch(Rectangle((i * 1.1, 0), 1.0, 1.0,
                               facecolor="#cfd8dc" if not hot else "#90caf9",
                               edgecolor="#455a64"))
        ax.text(i * 1.1 + 0.5, 0.62, cluster["id"],
                ha="center", va="center", fontsize=8)
        ax.text(i * 1.1 + 0.97, 0.06, str(cluster["commit_count"]),
                ha="right", va="bottom", fontsize=9, fontweight="bold")
    ax.set_xlim(-0.1, len(clusters) * 1.1)
    ax.set_ylim(-0.1, 1.2)
    ax.axis("off")
    ax.set_title(f"clusters in scope {scope_payload['node_range']}"
                 f" (g={scope_payload['granularity']})", fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_table_figure(table_payload: dict, path: str) -> None:
    columns = table_payload["columns"]
    dimensions = table_payload["dimensions"]
    k = table_payload["k"]

    cell_w, cell_h, gap = 3.0, 0.5, 0.25
    column_x = {c["id"]: i * (cell_w + gap) for i, c in enumerate(columns)}
    row_y = {}
    y = 0.0
    for dimension in dimensions:
        for rank in range(1, k + 1):
            row_y[(dimension, rank)] = y
            y -= cell_h
        y -= gap

    fig_height = max(2.0, -y * 0.55)
    fig, ax = plt.subplots(figsize=(max(6, len(columns) * 2.2), fig_height))

    for column in columns:
        x = column_x[column["id"]]
        ax.text(x + cell_w / 2, 0.65, column["id"], ha="center", fontsize=9,
                fontweight="bold")
        ax.text(x + cell_w / 2, 0.35,
                f"{column['commit_count']} commits", ha="center", fontsize=7)
        for dimension in dimensions:
            for entry in column["entries"][dimension]:
                top = row_y[(dimension, entry["rank"])]
                ax.add_patch(Rectangle((x, top - cell_h), cell_w, cell_h,
                                       facecolor=cell_color(dimension, entry["rank"]),
                                       edgecolor="white", linewidth=0.6))
                label = _shorten(entry["value"])
                counts = str(entry["count"]) if entry["loc"] is None \
                    else f"{entry['count']} | {entry['loc']} loc"
                ax.text(x + 0.06, top - cell_h / 2, label, ha="left",
                        va="center", fontsize=6.5)
                ax.text(x + cell_w - 0.06, top - cell_h + 0.05, counts,
                        ha="right", va="bottom", fontsize=5.5, color="#263238")

    for link in table_payload["rank_links"]:
        (left_id, right_id), (left_rank, right_rank) = link["columns"], link["ranks"]
        x0 = column_x[left_id] + cell_w
        y0 = row_y[(link["dimension"], left_rank)] - cell_h / 2
        x1 = column_x[right_id]
        y1 = row_y[(link["dimension"], right_rank)] - cell_h / 2
        bend = (x1 - x0) / 2
        curve = Path([(x0, y0), (x0 + bend, y0), (x1 - bend, y1), (x1, y1)],
                     [Path.MOVETO, Path.CURVE4, Path.CURVE4, Path.CURVE4])
        ax.add_patch(PathPatch(curve, fill=False, alpha=0.35, linewidth=0.8,
                               edgecolor=cell_color(link["dimension"], 3)))

    # dimension legend, upper right
    legend_x = len(columns) * (cell_w + gap) + 0.2
    for i, dimension in enumerate(dimensions):
        ax.add_patch(Rectangle((legend_x, 0.4 - i * 0.45), 0.35, 0.3,
                               facecolor=cell_color(dimension, 2)))
        ax.text(legend_x + 0.45, 0.55 - i * 0.45, dimension, fontsize=7,
                va="center")

    ax.set_xlim(-0.2, legend_x + 2.2)
    ax.set_ylim(y - 0.3, 1.0)
    ax.axis("off")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_report(scope_payload: dict, table_payload: dict,
                  out_dir: str) -> list[str]:
    """Write the figure pair into ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    strip = os.path.join(out_dir, "clusters.png")
    table = os.path.join(out_dir, "table.png")
    render_cluster_strip(scope_payload, strip)
    render_table_figure(table_payload, table)
    return [strip, table]
