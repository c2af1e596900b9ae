"""The four figure kinds, rendered deterministically to image files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import (
    SchemaError,
    read_dispersion,
    read_index,
    read_scan,
    read_series,
    read_snapshot_1d,
)

KINDS = ("heatmap", "series", "dispersion", "regime_map")

# fixed size/fonts/colormap so reruns are byte-identical
FIGSIZE = (6.4, 4.8)
DPI = 100
CMAP = "viridis"

REGIME_COLORS = {
    "two_real_speeds": "tab:blue",
    "growing_modes": "tab:red",
    "degenerate": "tab:gray",
}


@dataclass(frozen=True)
class FigureRequest:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    column: str | None = None  # heatmap only: which density column

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind '{self.kind}'")
        if len(self.inputs) != 1:
            raise SchemaError(f"{self.kind} takes exactly one input file")


def _new_axes():
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    return fig, ax


def _finish(fig, ax, req: FigureRequest):
    if req.title:
        ax.set_title(req.title)
    if req.xlim:
        ax.set_xlim(*req.xlim)
    if req.ylim:
        ax.set_ylim(*req.ylim)
    fig.tight_layout()
    fig.savefig(req.output, format="png")
    plt.close(fig)


def _heatmap(req: FigureRequest):
    times, paths = read_index(req.inputs[0])
    x0 = None
    rows = []
    column = req.column
    for p in paths:
        x, cols = read_snapshot_1d(p)
        if column is None:
            densities = [n for n in cols if n.startswith("U_")]
            if not densities:
                raise SchemaError(f"{p}: no density column to plot")
            column = densities[0]
        if column not in cols:
            raise SchemaError(f"{p}: unknown column '{column}'")
        if x0 is None:
            x0 = x
        rows.append(cols[column])
    grid = np.array(rows)
    fig, ax = _new_axes()
    mesh = ax.pcolormesh(x0, times, grid, cmap=CMAP, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=column)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    _finish(fig, ax, req)


def _series(req: FigureRequest):
    t, totals = read_series(req.inputs[0])
    fig, ax = _new_axes()
    for name, vals in totals.items():
        ax.plot(t, vals, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("aggregate")
    ax.legend()
    _finish(fig, ax, req)


def _recover_even_quartic(roots, k):
    # w^4 - a k^2 w^2 + b k^4 = 0: Vieta on the w^2 values
    w2 = roots**2
    a = np.real(np.sum(w2, axis=1)) / (2.0 * k * k)
    b = np.real(np.prod(roots, axis=1)) / k**4
    return a, b


def _dispersion(req: FigureRequest):
    d = read_dispersion(req.inputs[0])
    k = d["k"]
    order = np.argsort(k)
    k = k[order]
    roots = d["roots"][order]
    fig, ax = _new_axes()
    re = np.sort(np.abs(roots.real), axis=1)
    im = np.sort(np.abs(roots.imag), axis=1)
    for i in range(4):
        ax.plot(k, re[:, i], color="tab:blue", marker="o", markersize=3,
                label="quartic roots |Re w|" if i == 0 else None)
    if np.any(im > 0):
        for i in range(4):
            ax.plot(k, im[:, i], color="tab:red", marker="o", markersize=3,
                    label="quartic roots |Im w|" if i == 0 else None)
    # overlay the published closed forms wherever the growing regime holds;
    # they need not coincide with the root curves and both are always drawn
    a, b = _recover_even_quartic(roots, k)
    growing = a * a < 4.0 * b
    if np.any(growing):
        kg = k[growing]
        s = np.sqrt(4.0 * b[growing] + 3.0 * a[growing] ** 2)
        w_cl = kg * np.sqrt((s + 2.0 * a[growing]) / 8.0)
        g_cl = kg * np.sqrt((s - 2.0 * a[growing]) / 8.0)
        ax.plot(kg, w_cl, color="tab:cyan", linestyle="--", label="closed-form w")
        ax.plot(kg, g_cl, color="tab:orange", linestyle="--", label="closed-form gamma")
    ax.set_xlabel("k")
    ax.set_ylabel("frequency / rate")
    ax.legend()
    _finish(fig, ax, req)


def _regime_map(req: FigureRequest):
    a, b, regime = read_scan(req.inputs[0])
    fig, ax = _new_axes()
    a2 = a * a
    b4 = 4.0 * b
    for name, color in REGIME_COLORS.items():
        mask = np.array([r == name for r in regime])
        if np.any(mask):
            ax.scatter(a2[mask], b4[mask], s=8, color=color, label=name)
    finite = np.isfinite(a2) & np.isfinite(b4)
    if np.any(finite):
        hi = float(max(np.max(a2[finite]), np.max(b4[finite]), 1.0))
        line = np.linspace(0.0, hi, 2)
        ax.plot(line, line, color="black", linewidth=1, label="a^2 = 4b")
    ax.set_xlabel("a^2")
    ax.set_ylabel("4b")
    ax.legend()
    _finish(fig, ax, req)


_RENDERERS = {
    "heatmap": _heatmap,
    "series": _series,
    "dispersion": _dispersion,
    "regime_map": _regime_map,
}


def render(req: FigureRequest) -> Path:
    """Validate inputs, draw the figure and write the image file.

    Inputs are fully parsed before the output file is opened, so a schema
    error never leaves a partial image behind.
    """
    _RENDERERS[req.kind](req)
    out = Path(req.output)
    if not out.is_file() or out.stat().st_size == 0:
        raise SchemaError(f"failed to write {out}")
    return out
