"""Matplotlib rendering for settings and generator reports.

Everything draws to files through the Agg backend so the CLI can run
headless; figures accompany the machine-readable report and the CSV table,
they never replace them.
"""

from __future__ import annotations

import csv
import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .quiver import Setting

plt.rcParams.update(
    {
        "figure.dpi": 110,
        "font.size": 9,
        "axes.titlesize": 10,
    }
)

KIND_COLORS = {"sigma": "#3465a4", "bpf": "#cc0000", "plin": "#4e9a06"}


def _vertex_positions(count: int):
    if count == 1:
        return {1: (0.0, 0.0)}
    out = {}
    for v in range(1, count + 1):
        angle = 2 * math.pi * (v - 1) / count + math.pi / 2
        out[v] = (math.cos(angle), math.sin(angle))
    return out


def render_setting(setting: Setting, path: str, title: str = "mixed quiver setting"):
    """Draw the quiver with vertex group labels and arrow kinds."""
    pos = _vertex_positions(setting.vertices)
    fig, ax = plt.subplots(figsize=(5.5, 5.0))
    ax.set_title(title)
    seen_pairs: dict = {}
    for a in setting.quiver.arrows:
        x1, y1 = pos[a.tail]
        x2, y2 = pos[a.head]
        label = a.name if a.kind == "M" else f"{a.name} ({a.kind})"
        if a.tail == a.head:
            loops = seen_pairs.get((a.tail, a.head), 0)
            seen_pairs[(a.tail, a.head)] = loops + 1
            r = 0.16 + 0.09 * loops
            circle = plt.Circle((x1, y1 + 0.14 + r), r, fill=False, color="#555555")
            ax.add_patch(circle)
            ax.annotate(label, (x1, y1 + 0.14 + 2 * r + 0.06), ha="center", fontsize=8)
            continue
        count = seen_pairs.get((a.tail, a.head), 0) + seen_pairs.get((a.head, a.tail), 0)
        seen_pairs[(a.tail, a.head)] = seen_pairs.get((a.tail, a.head), 0) + 1
        bend = 0.12 * (count + 1) * (1 if count % 2 == 0 else -1)
        arrow = FancyArrowPatch(
            (x1, y1),
            (x2, y2),
            connectionstyle=f"arc3,rad={bend}",
            arrowstyle="-|>",
            mutation_scale=14,
            shrinkA=18,
            shrinkB=18,
            color="#555555",
        )
        ax.add_patch(arrow)
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        ax.annotate(label, (mx + bend * (y2 - y1), my - bend * (x2 - x1)), ha="center", fontsize=8)
    for v, (x, y) in pos.items():
        dual = setting.inv(v)
        tag = f"{v}\n{setting.group_of(v)}({setting.dim_of(v)})"
        if dual != v:
            tag += f"\n↔ {dual}"
        ax.plot([x], [y], "o", markersize=26, color="#fce5a8", markeredgecolor="#555555")
        ax.annotate(tag, (x, y), ha="center", va="center", fontsize=7)
    ax.set_xlim(-1.7, 1.7)
    ax.set_ylim(-1.7, 1.9)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_generator_degrees(descriptors: Sequence, path: str):
    """Bar chart of generator counts by total degree, split by family."""
    buckets: dict = {}
    for d in descriptors:
        total = sum(d.multidegree)
        buckets.setdefault(d.kind, {}).setdefault(total, 0)
        buckets[d.kind][total] += 1
    degrees = sorted({deg for per in buckets.values() for deg in per})
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    width = 0.8 / max(1, len(buckets))
    for idx, (kind, per) in enumerate(sorted(buckets.items())):
        xs = [d + idx * width for d in range(len(degrees))]
        ys = [per.get(deg, 0) for deg in degrees]
        ax.bar(xs, ys, width=width, label=kind, color=KIND_COLORS.get(kind, "#888888"))
    ax.set_xticks(range(len(degrees)))
    ax.set_xticklabels([str(d) for d in degrees])
    ax.set_xlabel("total degree")
    ax.set_ylabel("generators")
    ax.set_title("generators by total degree")
    if buckets:
        ax.legend()
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_verification_summary(checks: Sequence[dict], path: str):
    """Horizontal pass/fail summary of verification checks."""
    passed = sum(1 for c in checks if c.get("ok"))
    failed = len(checks) - passed
    fig, ax = plt.subplots(figsize=(5.5, 1.8))
    ax.barh(["pass", "fail"], [passed, failed], color=["#4e9a06", "#cc0000"])
    for i, v in enumerate([passed, failed]):
        ax.annotate(str(v), (v, i), va="center", ha="left", fontsize=9)
    ax.set_title(f"verification checks ({len(checks)} total)")
    ax.set_xlim(0, max(1, passed, failed) * 1.2)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def write_generator_csv(descriptors: Sequence, path: str):
    """Delimited table of the generator report: one row per descriptor."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["index", "kind", "spec", "k", "multidegree", "terms", "duplicate_of", "polynomial"]
        )
        for idx, d in enumerate(descriptors):
            if d.kind == "sigma":
                spec = " ".join(d.path)
            elif d.kind == "bpf":
                spec = f"weight={list(d.weight)} paths=" + ";".join(" ".join(p) for p in d.paths)
            else:
                spec = f"degrees={list(d.degrees)} words=" + ";".join(" ".join(w) for w in d.words)
            poly = str(d.polynomial) if len(d.polynomial.terms) <= 60 else f"<{len(d.polynomial.terms)} terms>"
            writer.writerow(
                [
                    idx,
                    d.kind,
                    spec,
                    d.k if d.k is not None else "",
                    ",".join(str(x) for x in d.multidegree),
                    len(d.polynomial.terms),
                    d.duplicate_of if d.duplicate_of is not None else "",
                    poly,
                ]
            )
