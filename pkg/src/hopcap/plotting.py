"""Matplotlib styling and figure helpers for report output."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.family": "sans-serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.4,
    "savefig.bbox": "tight",
    # fixed ids and no timestamp keep SVG output byte-stable
    "svg.hashsalt": "hopcap",
    "svg.fonttype": "path",
}

COLORS = {
    "true": "0.15",
    "dynamic": "#1f6fb4",
    "dynamic-expectation": "#1f6fb4",
    "dynamic-raw": "#e08214",
    "dynamic-exact": "#2b9348",
    "mceliece": "#8c2d04",
    "lowe-bias": "#b2182b",
    "lowe-corr": "#762a83",
}


def figsize(scale: float = 1.0, ratio: float | None = None) -> tuple[float, float]:
    width = 6.0 * scale
    if ratio is None:
        ratio = (math.sqrt(5.0) - 1.0) / 2.0
    return width, width * ratio


def new_figure(nrows=1, ncols=1, scale=1.0, ratio=None):
    plt.rcParams.update(STYLE)
    return plt.subplots(nrows=nrows, ncols=ncols, figsize=figsize(scale, ratio))


def save(fig, path) -> None:
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
