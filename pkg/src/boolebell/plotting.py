"""Render scan results to figure files (headless matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_scan(result, out_path, title: str | None = None, max_traces: int = 2000):
    """One violation trace per inequality over the sweep, zero baseline marked.

    Values above zero are quantum violations of the classical bound.  For 2-D
    sweeps the per-point maximum violation is drawn as a heatmap instead.
    """
    if len(result.family.axes) == 1:
        _render_1d(result, out_path, title, max_traces)
    else:
        _render_2d(result, out_path, title)


def _render_1d(result, out_path, title, max_traces):
    xs = np.array([pt[0].radians for pt in result.grid])
    viol = result.violations
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    n = viol.shape[1]
    step = max(1, n // max_traces)
    ax.plot(xs, viol[:, ::step], color="0.55", linewidth=0.4, alpha=0.35)
    ax.plot(xs, viol.max(axis=1), color="crimson", linewidth=1.6,
            label="max violation")
    ax.axhline(0.0, color="black", linewidth=0.9)
    ax.set_xlabel(result.family.axes[0] + " (rad)")
    ax.set_ylabel("quantum value - classical bound")
    ax.set_title(title or f"{result.family.name} sweep ({n} inequalities)")
    ax.legend(loc="upper right", frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def _render_2d(result, out_path, title):
    ax1 = sorted({pt[0].radians for pt in result.grid})
    ax2 = sorted({pt[1].radians for pt in result.grid})
    best = result.violations.max(axis=1).reshape(len(ax1), len(ax2))
    fig, ax = plt.subplots(figsize=(7.0, 5.6))
    mesh = ax.pcolormesh(ax2, ax1, best, shading="nearest", cmap="RdBu_r",
                         vmin=-abs(best).max(), vmax=abs(best).max())
    fig.colorbar(mesh, ax=ax, label="max violation")
    ax.set_xlabel(result.family.axes[1] + " (rad)")
    ax.set_ylabel(result.family.axes[0] + " (rad)")
    ax.set_title(title or f"{result.family.name} sweep")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
