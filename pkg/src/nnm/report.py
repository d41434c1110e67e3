"""Matplotlib figures rendered next to the delimited trajectory output."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .graph import MapGraph
from .script import ROLE_COLORS, TrajectoryRecord


def save_trajectory_chart(records: list[TrajectoryRecord], path: str | Path) -> None:
    """Node distance and text similarity per script step, on twin axes."""
    steps = [r.step_id for r in records]
    dists = [r.node_dist for r in records]
    sims = [float("nan") if r.text_similarity is None else r.text_similarity for r in records]
    fig, ax_dist = plt.subplots(figsize=(7.0, 4.0))
    ax_sim = ax_dist.twinx()
    ax_dist.plot(steps, dists, "o-", color="tab:blue", label="node distance")
    ax_sim.plot(steps, sims, "s-", color="tab:red", label="text similarity")
    ax_dist.set_xlabel("script step")
    ax_dist.set_ylabel("node distance (layout units)", color="tab:blue")
    ax_sim.set_ylabel("text similarity", color="tab:red")
    ax_sim.set_ylim(0.0, 1.0)
    ax_dist.set_title("node distance vs text similarity")
    ax_dist.set_xticks(steps)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_map_figure(
    graph: MapGraph,
    path: str | Path,
    records: list[TrajectoryRecord] | None = None,
) -> None:
    """The laid-out map: black edges, nodes sized by query count, labels,
    and per-role trajectory arrows over the matched nodes when records are given."""
    positions = {i: n.position for i, n in graph.nodes.items() if n.position is not None}
    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    for a, b in sorted(graph.edges):
        if a in positions and b in positions:
            (ax_, ay), (bx, by) = positions[a], positions[b]
            ax.plot([ax_, bx], [ay, by], color="black", linewidth=0.8, zorder=1)
    for node_id, pos in positions.items():
        node = graph.nodes[node_id]
        size = 40.0 * math.sqrt(node.query_count + 1)
        ax.scatter([pos[0]], [pos[1]], s=size, color="#7fb3d5", edgecolors="black", zorder=2)
        ax.annotate(node.name, pos, textcoords="offset points", xytext=(4, 4), fontsize=8)
    if records:
        by_name = {graph.nodes[i].name: p for i, p in positions.items()}
        paths: dict[str, list[tuple[float, float]]] = {}
        for rec in records:
            pos = by_name.get(rec.node)
            if pos is None:
                continue
            trail = paths.setdefault(rec.role, [])
            if not trail or trail[-1] != pos:
                trail.append(pos)
        for role, trail in paths.items():
            color = ROLE_COLORS.get(role, "#2ca02c")
            for (x0, y0), (x1, y1) in zip(trail, trail[1:]):
                ax.annotate(
                    "", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops={"arrowstyle": "->", "color": color, "linewidth": 1.6},
                    zorder=3,
                )
            if trail:
                ax.scatter([trail[0][0]], [trail[0][1]], s=160, facecolors="none",
                           edgecolors=color, linewidths=1.6, zorder=3)
    ax.set_aspect("equal")
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
