"""Matplotlib rendering for the CLI report path.

Each command can emit a PNG next to its delimited output.  Figures are kept
deliberately plain: one panel per report, cells as separate lines, the
reference levels (vacuum noise, Poissonian boundary) drawn where they carry
meaning.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .noise import delta
from .stats import mean_amplitude
from .cli import parse_input


def _label(cell_label, params):
    return cell_label or f"aprime{params.aprime:g}"


def render_series(cfg, cells, stem):
    command = cfg["command"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if command == "gain":
        for label, params, cols, _ in cells:
            ax.plot(cols["tau"], cols["G"], label=_label(label, params))
        ax.axhline(1.0, color="0.7", lw=0.8)
        ax.set_ylabel("G")
    elif command == "noise":
        field = parse_input(cfg["input"])
        for label, params, cols, _ in cells:
            taus = np.asarray(cols["tau"])
            signal = np.abs(mean_amplitude(params, field, taus))
            width = np.sqrt(np.asarray(delta(params, taus)))
            ax.plot(taus, signal, label=_label(label, params))
            ax.plot(taus, signal + width, "--", color="0.5", lw=0.8)
            ax.plot(taus, signal - width, "--", color="0.5", lw=0.8)
        ax.set_ylabel("|<a>| and width")
    elif command == "mandel":
        for label, params, cols, summary in cells:
            line, = ax.plot(cols["tau"], cols["Q"], label=_label(label, params))
            if "tau_q" in summary:
                ax.axvline(summary["tau_q"], color=line.get_color(), lw=0.8, ls=":")
        ax.axhline(0.0, color="0.7", lw=0.8)
        ax.set_ylabel("Q")
    elif command == "squeezing":
        for label, params, cols, _ in cells:
            ax.plot(cols["tau"], cols["var_u"], label="var_u " + _label(label, params))
            ax.plot(cols["tau"], cols["var_v"], "--", label="var_v " + _label(label, params))
        ax.axhline(0.5, color="0.7", lw=0.8)
        ax.set_yscale("log")
        ax.set_ylabel("quadrature variance")
    elif command == "thermal":
        for label, params, cols, _ in cells:
            ax.plot(cols["tau"], cols["T"], label=_label(label, params))
        ax.set_ylabel("T")
        inset = fig.add_axes([0.2, 0.55, 0.25, 0.3])
        label0, params0, cols0, _ = cells[0]
        inset.plot(cols0["tau"], cols0["N2_over_N1"], color="0.3", lw=0.9)
        inset.set_title("N2/N1", fontsize=8)
        inset.tick_params(labelsize=7)
    ax.set_xlabel("tau")
    ax.legend(fontsize=8)
    path = stem.with_suffix(".png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_wigner(cfg, grids, stem):
    n = len(grids)
    cols = min(3, n)
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3.4 * cols, 3.0 * rows),
                             squeeze=False)
    for k, (label, grid) in enumerate(grids):
        ax = axes[k // cols][k % cols]
        ax.contour(grid.re_axis, grid.im_axis, grid.values, levels=8)
        ax.set_title(f"tau = {grid.tau:g}" + (f" ({label})" if label else ""),
                     fontsize=9)
        ax.set_aspect("equal")
        ax.set_xlabel("Re alpha", fontsize=8)
        ax.set_ylabel("Im alpha", fontsize=8)
    for k in range(n, rows * cols):
        axes[k // cols][k % cols].axis("off")
    path = stem.with_suffix(".png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
