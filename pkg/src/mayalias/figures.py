"""Figure rendering for analysis reports.

Writes one alias graph per reported routine (nodes are expressions, edges are
claimed alias pairs) and a bar chart of frame findings by kind.  Rendering is
headless and layouts are deterministic.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]+", "_", name)


def _alias_figure(entry: dict, path: Path) -> None:
    g = nx.Graph()
    for group in entry["aliasGroups"]:
        for i, a in enumerate(group):
            g.add_node(a)
            for b in group[i + 1:]:
                g.add_edge(a, b)
    for e in entry["top"]:
        g.add_node(f"{e} (top)")
    fig, ax = plt.subplots(figsize=(6, 6))
    if g.number_of_nodes():
        pos = nx.circular_layout(sorted(g.nodes()))
        nx.draw_networkx(
            g,
            pos=pos,
            ax=ax,
            node_color="#cfe2f3",
            edge_color="#666666",
            font_size=8,
        )
    else:
        ax.text(0.5, 0.5, "no aliasing", ha="center", va="center")
    ax.set_title(f"alias pairs: {entry['routine']}")
    ax.set_axis_off()
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def _findings_figure(report: dict, path: Path) -> None:
    counts: dict[str, int] = {}
    for f in report["findings"]:
        counts[f["kind"]] = counts.get(f["kind"], 0) + 1
    fig, ax = plt.subplots(figsize=(6, 4))
    kinds = sorted(counts)
    ax.bar(kinds, [counts[k] for k in kinds], color="#9fc5e8")
    ax.set_ylabel("routines")
    ax.set_title("frame findings by kind")
    if not kinds:
        ax.text(0.5, 0.5, "no findings", ha="center", va="center")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_figures(report: dict, out_dir: str) -> list[str]:
    """Render all figures for a report into `out_dir`; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    for entry in report["routines"]:
        path = out / f"alias_{_slug(entry['routine'])}.png"
        _alias_figure(entry, path)
        written.append(str(path))
    path = out / "findings.png"
    _findings_figure(report, path)
    written.append(str(path))
    return written
