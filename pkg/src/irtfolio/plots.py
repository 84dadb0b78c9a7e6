"""Render analysis payloads as SVG or PNG images.

All plots draw from the JSON payload (numeric grids), never from live fit
objects, so anything rendered can be reproduced from a cached analysis.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import algorithm_slugs, with_epsilon
from .errors import ValidationError

_RC = {
    "svg.hashsalt": "irtfolio",
    "figure.figsize": (8.0, 5.0),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

_BASE_KINDS = (
    "1",
    "2",
    "3",
    "4",
    "goodness",
    "effectiveness1",
    "effectiveness2",
    "effectiveness3",
)


def plot_kinds(payload: dict) -> list[str]:
    """All plot identifiers available for a payload, heatmaps included."""
    slugs = algorithm_slugs(payload["dataset"]["algorithms"])
    return list(_BASE_KINDS) + [f"heatmap-{slugs[n]}" for n in payload["dataset"]["algorithms"]]


def _colors(n: int) -> list:
    cmap = plt.get_cmap("tab10" if n <= 10 else "tab20")
    return [cmap(i % cmap.N) for i in range(n)]


def _scatter(payload, ax, names, colors, combined: bool):
    difficulty = np.asarray(payload["traits"]["difficulty"])
    values = np.asarray(payload["performance"]["values"])
    if combined:
        for j, name in enumerate(names):
            ax.scatter(difficulty, values[:, j], s=12, alpha=0.6, color=colors[j], label=name)
        ax.legend(fontsize=8)
        ax.set_title("Performance across the difficulty spectrum")
    return difficulty, values


def _plot_scatter_combined(payload, fig):
    names = payload["dataset"]["algorithms"]
    ax = fig.subplots()
    _scatter(payload, ax, names, _colors(len(names)), combined=True)
    ax.set_xlabel("problem difficulty")
    ax.set_ylabel("performance")


def _plot_scatter_facets(payload, fig):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    difficulty = np.asarray(payload["traits"]["difficulty"])
    values = np.asarray(payload["performance"]["values"])
    ncols = min(4, len(names))
    nrows = -(-len(names) // ncols)
    axes = fig.subplots(nrows, ncols, squeeze=False, sharex=True, sharey=True)
    for j, name in enumerate(names):
        ax = axes[j // ncols][j % ncols]
        ax.scatter(difficulty, values[:, j], s=10, alpha=0.6, color=colors[j])
        ax.set_title(name, fontsize=9)
    for k in range(len(names), nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.supxlabel("problem difficulty")
    fig.supylabel("performance")


def _plot_splines(payload, fig):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    grid = np.asarray(payload["spectrum"]["grid"])
    ax = fig.subplots()
    for j, name in enumerate(names):
        fitted = np.asarray(payload["splines"]["fitted"][name])
        se = np.asarray(payload["splines"]["se"][name])
        ax.plot(grid, fitted, color=colors[j], label=name)
        ax.fill_between(
            grid, fitted - 1.96 * se, fitted + 1.96 * se, color=colors[j], alpha=0.15
        )
    ax.set_xlabel("problem difficulty")
    ax.set_ylabel("performance")
    ax.set_title("Smoothing splines with standard-error bands")
    ax.legend(fontsize=8)


def _occupancy_segments(grid: np.ndarray, member: np.ndarray) -> list[tuple[float, float]]:
    """Contiguous grid runs where an algorithm is in a set, as (start, width)."""
    segments = []
    start = None
    step = grid[1] - grid[0] if len(grid) > 1 else 0.0
    for g, flag in enumerate(member):
        if flag and start is None:
            start = grid[g]
        if not flag and start is not None:
            segments.append((start, grid[g] - start))
            start = None
    if start is not None:
        segments.append((start, grid[-1] - start + step / 2))
    return segments


def _plot_strengths_weaknesses(payload, fig):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    grid = np.asarray(payload["spectrum"]["grid"])
    partition = payload["partition"]
    top, bottom = fig.subplots(2, 1, sharex=True)
    for ax, key, title in ((top, "good", "Strengths"), (bottom, "bad", "Weaknesses")):
        for j, name in enumerate(names):
            member = np.asarray(partition[key][name], dtype=bool)
            ax.broken_barh(
                _occupancy_segments(grid, member), (j - 0.35, 0.7), color=colors[j]
            )
        ax.set_yticks(range(len(names)), names, fontsize=8)
        ax.set_title(f"{title} (epsilon={partition['epsilon']:g})", fontsize=10)
        ax.invert_yaxis()
    bottom.set_xlabel("problem difficulty")


def _plot_goodness(payload, fig):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    tol = np.asarray(payload["goodness"]["tolerances"])
    ax = fig.subplots()
    for j, name in enumerate(names):
        auc = payload["goodness"]["auc"][name]
        ax.plot(
            tol,
            payload["goodness"]["curves"][name],
            color=colors[j],
            label=f"{name} (AUC {auc:.3f})",
        )
    ax.set_xlabel("absolute residual tolerance")
    ax.set_ylabel("fraction of instances")
    ax.set_title("Model goodness: residual distribution")
    ax.legend(fontsize=8)


def _plot_effectiveness_curves(payload, fig, key: str, title: str):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    tol = np.asarray(payload["effectiveness"]["tolerances"])
    ax = fig.subplots()
    for j, name in enumerate(names):
        ax.plot(tol, payload["effectiveness"][key][name], color=colors[j], label=name)
    ax.set_xlabel("effectiveness tolerance")
    ax.set_ylabel("fraction of instances within tolerance of best")
    ax.set_title(title)
    ax.legend(fontsize=8)


def _plot_effectiveness_scatter(payload, fig):
    names = payload["dataset"]["algorithms"]
    colors = _colors(len(names))
    ax = fig.subplots()
    for j, name in enumerate(names):
        x = payload["effectiveness"]["auc_actual"][name]
        y = payload["effectiveness"]["auc_predicted"][name]
        ax.scatter([x], [y], color=colors[j], label=name)
        ax.annotate(name, (x, y), fontsize=7, xytext=(4, 4), textcoords="offset points")
    ax.plot([0, 1], [0, 1], linestyle=":", color="black", linewidth=1)
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("actual effectiveness (AUC)")
    ax.set_ylabel("predicted effectiveness (AUC)")
    ax.set_title("Predicted against actual effectiveness")


def _plot_heatmap(payload, fig, name: str):
    theta = np.asarray(payload["heatmaps"]["theta_grid"])
    entry = payload["heatmaps"]["algorithms"][name]
    z = np.asarray(entry["z_grid"])
    density = np.asarray(entry["density"])
    ax = fig.subplots()
    mesh = ax.pcolormesh(theta, z, density, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="density")
    ax.set_xlabel("latent easiness")
    ax.set_ylabel("performance")
    ax.set_title(f"Conditional performance density: {name}")


def render_plot(payload: dict, kind: str, fmt: str = "svg", epsilon=None) -> bytes:
    """Render one plot kind from a payload and return the image bytes."""
    if fmt not in ("svg", "png"):
        raise ValidationError(f"unsupported image format {fmt!r}")
    if epsilon is not None and kind == "4":
        payload = with_epsilon(payload, epsilon)
    names = payload["dataset"]["algorithms"]
    slugs = algorithm_slugs(names)

    with plt.rc_context(_RC):
        fig = plt.figure()
        try:
            if kind == "1":
                _plot_scatter_combined(payload, fig)
            elif kind == "2":
                _plot_scatter_facets(payload, fig)
            elif kind == "3":
                _plot_splines(payload, fig)
            elif kind == "4":
                _plot_strengths_weaknesses(payload, fig)
            elif kind == "goodness":
                _plot_goodness(payload, fig)
            elif kind == "effectiveness1":
                _plot_effectiveness_curves(
                    payload, fig, "actual", "Actual effectiveness against tolerance"
                )
            elif kind == "effectiveness2":
                _plot_effectiveness_curves(
                    payload,
                    fig,
                    "predicted",
                    "Predicted effectiveness against tolerance",
                )
            elif kind == "effectiveness3":
                _plot_effectiveness_scatter(payload, fig)
            elif kind.startswith("heatmap-"):
                slug = kind[len("heatmap-") :]
                matches = [n for n in names if slugs[n] == slug]
                if not matches:
                    raise ValidationError(f"unknown heatmap {slug!r}")
                _plot_heatmap(payload, fig, matches[0])
            else:
                raise ValidationError(f"unknown plot kind {kind!r}")
            fig.tight_layout()
            buffer = io.BytesIO()
            metadata = {"Date": None} if fmt == "svg" else None
            fig.savefig(buffer, format=fmt, metadata=metadata)
        finally:
            plt.close(fig)
    return buffer.getvalue()
