"""Figure renderers for suite reports and sweeps.

Figures are a convenience layer over the delimited outputs: the JSON and
CSV stay the record of truth, these renderings just make trends visible at
a glance.  Everything draws through matplotlib Figure objects directly (no
pyplot state), so rendering is safe from worker threads and headless runs.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

# log-scale floor for residuals that are exactly zero
_LOG_FLOOR = 1e-18


def _finite_floor(value: float) -> float:
    if not math.isfinite(value) or value <= 0.0:
        return _LOG_FLOOR
    return max(value, _LOG_FLOOR)


def render_suite_residuals(reports, path) -> Path:
    """Horizontal bars: worst residual per check against its tolerance."""
    path = Path(path)
    names = [rep.check for rep in reports]
    worst = [_finite_floor(max(rep.residuals.values(), default=0.0))
             for rep in reports]
    gates = [_finite_floor(rep.tolerance) for rep in reports]
    colors = ["tab:blue" if rep.passed else "tab:red" for rep in reports]

    fig = Figure(figsize=(8.0, 0.42 * max(len(names), 4) + 1.2))
    ax = fig.add_subplot(111)
    y = np.arange(len(names))
    ax.barh(y, worst, color=colors, height=0.6)
    ax.scatter(gates, y, marker="|", s=120, color="black", zorder=3,
               label="tolerance")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("worst residual")
    ax.set_title("suite residuals")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def render_sweep_ratios(sweep, path) -> Path:
    """Ratio column against the sweep axis, one line per p."""
    path = Path(path)
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot(111)
    ps = sorted({row[1] for row in sweep.rows})
    for p in ps:
        rows = [row for row in sweep.rows if row[1] == p]
        xs = [row[0] for row in rows]
        ys = [_finite_floor(row[4]) for row in rows]
        label = "p=inf" if math.isinf(p) else f"p={p:g}"
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_yscale("log")
    ax.set_xlabel(sweep.axis)
    ax.set_ylabel("schatten / comparison norm")
    ax.set_title("comparability ratios")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def render_singular_values(proxy, path) -> Path:
    """Spectra of the family, descending, with the tail cut marked."""
    path = Path(path)
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot(111)
    for size, sigma, cut in zip(proxy.sizes, proxy.singular_values,
                                proxy.tail_indices):
        values = [_finite_floor(s) for s in sigma]
        line, = ax.semilogy(range(1, len(values) + 1), values, marker=".",
                            label=f"N={size}")
        ax.axvline(cut + 0.5, color=line.get_color(), linestyle=":",
                   linewidth=0.8)
    ax.set_xlabel("singular value index")
    ax.set_ylabel("sigma_k")
    ax.set_title("singular value decay")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path
