"""Figures written by the CLI: a framework drawing and a verification summary."""

from __future__ import annotations

import math
from collections import Counter
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import FancyArrowPatch  # noqa: E402

from .framework import AuxArg, Setaf, argument_names  # noqa: E402


def _arrow(ax, p, q, color, style="-|>", rad=0.0, lw=1.0):
    ax.add_patch(
        FancyArrowPatch(
            p, q, arrowstyle=style, mutation_scale=10, color=color, lw=lw,
            connectionstyle=f"arc3,rad={rad}", shrinkA=11, shrinkB=11,
        )
    )


def draw_framework(setaf: Setaf, path: str | Path, labels: Mapping | None = None, title: str = "") -> Path:
    """Arguments on a circle; collective attacks meet at a small hub first."""
    names = argument_names(setaf, labels)
    args = setaf.sorted_arguments()
    n = max(len(args), 1)
    pos = {
        a: (math.cos(2 * math.pi * i / n + math.pi / 2), math.sin(2 * math.pi * i / n + math.pi / 2))
        for i, a in enumerate(args)
    }
    fig, ax = plt.subplots(figsize=(6, 6))
    for att in setaf.sorted_attacks():
        tgt = pos[att.target]
        if len(att.source) == 1:
            (src,) = att.source
            if src == att.target:
                x, y = tgt
                ax.add_patch(plt.Circle((x * 1.12, y * 1.12), 0.07, fill=False, color="tab:red", lw=0.8))
            else:
                _arrow(ax, pos[src], tgt, "tab:blue", rad=0.08)
            continue
        pts = [pos[a] for a in att.source]
        hub = (sum(p[0] for p in pts) / len(pts) * 0.6 + tgt[0] * 0.4,
               sum(p[1] for p in pts) / len(pts) * 0.6 + tgt[1] * 0.4)
        for p in pts:
            ax.add_patch(FancyArrowPatch(p, hub, arrowstyle="-", color="tab:purple", lw=0.8, shrinkA=11, shrinkB=0))
        ax.add_patch(FancyArrowPatch(hub, tgt, arrowstyle="-|>", mutation_scale=10, color="tab:purple", lw=1.0, shrinkA=0, shrinkB=11))
        ax.plot(*hub, marker="o", ms=3, color="tab:purple")
    for a, (x, y) in pos.items():
        aux = isinstance(a, AuxArg)
        ax.plot(x, y, marker="s" if aux else "o", ms=18, mfc="white", mec="gray" if aux else "black")
        ax.annotate(names[a], (x, y), ha="center", va="center", fontsize=7)
    ax.set_xlim(-1.35, 1.35)
    ax.set_ylim(-1.35, 1.35)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_verification(rows: Sequence[Mapping], path: str | Path) -> Path:
    """Stacked bars of passing and failing instances per constraint family."""
    counts: Counter = Counter((r["family"], bool(r["ok"])) for r in rows)
    families = sorted({r["family"] for r in rows}) or ["none"]
    ok = [counts[(f, True)] for f in families]
    bad = [counts[(f, False)] for f in families]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(families, ok, color="tab:green", label="pass")
    ax.bar(families, bad, bottom=ok, color="tab:red", label="fail")
    ax.set_ylabel("instances")
    ax.set_title("repairs vs. extensions")
    ax.legend()
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
