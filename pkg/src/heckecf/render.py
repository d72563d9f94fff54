"""Matplotlib figure builders for map graphs, cover diagrams, and orbits.

Figures are written through the SVG backend with a fixed hash salt and no
date metadata, so identical invocations produce byte-identical files.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .attractor import cover_at_level  # noqa: E402

SAMPLES_PER_BRANCH = 512

plt.rcParams["svg.hashsalt"] = "hecke-cf"


def _new_axes(title):
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.set_title(title, fontsize=10)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    return fig, ax


def _branch_curve(matrix, lo, hi, samples=SAMPLES_PER_BRANCH):
    inv = matrix.inverse()
    a, b, c, d = (float(v) for v in inv.entries)
    xs, ys = [], []
    for k in range(samples):
        x = lo + (hi - lo) * k / (samples - 1)
        xs.append(x)
        ys.append((a * x + b) / (c * x + d))
    return xs, ys


def map_graph_figure(fmap, title="map"):
    """Piecewise graph of a Farey-type map, one curve per branch."""
    fig, ax = _new_axes(title)
    for br in fmap.branches:
        lo, hi = float(br.domain.lo), float(br.domain.hi)
        ax.plot(*_branch_curve(br.matrix, lo, hi), linewidth=1.0)
    top = float(fmap.field.inv_lambda())
    ax.plot([0, top], [0, top], linestyle=":", linewidth=0.6, color="gray")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    return fig


def dual_graph_figure(dual, title="dual map"):
    """Graph of the dual map over its (possibly disconnected) branch domains."""
    fig, ax = _new_axes(title)
    spec = dual.cover.spec
    top = float(spec.inv_lambda())
    for br in dual.branches:
        for lo, hi in br.domain.float_pairs():
            if hi > lo:
                ax.plot(*_branch_curve(br.matrix, lo, hi), linewidth=1.0)
    ax.plot([0, top], [0, top], linestyle=":", linewidth=0.6, color="gray")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    return fig


def cover_figure(tree, max_level, title="attractor covers"):
    """Covers drawn as horizontal bars stacked by level."""
    fig, ax = _new_axes(title)
    for level in range(max_level + 1):
        for lo, hi in cover_at_level(tree, level).float_pairs():
            ax.plot([lo, hi], [-level, -level], linewidth=3.0,
                    solid_capstyle="butt", color="tab:blue")
    ax.set_yticks([-k for k in range(max_level + 1)])
    ax.set_yticklabels([str(k) for k in range(max_level + 1)])
    ax.set_ylabel("level")
    return fig


def orbit_figure(points, title="orbit"):
    """Scatter plot of natural-extension orbit points; valid when empty."""
    fig, ax = _new_axes(title)
    if points:
        ax.scatter([p[0] for p in points], [p[1] for p in points],
                   s=0.3, linewidths=0, color="black")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    return fig


def figure_to_svg_bytes(fig):
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return buf.getvalue()
