"""Figure rendering for experiment reports (headless, written next to the data)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _style(ax):
    ax.grid(True, which="both", alpha=0.3)
    ax.tick_params(labelsize=9)


def scaling_figure(report, path):
    """Log-log means with the fitted line and, when present, the predicted slope."""
    rows = [r for r in report.rows if r.valid]
    sizes = np.array([r.size for r in rows], dtype=float)
    means = np.array([r.mean for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(sizes, means, "o", ms=5, label=f"mean {report.statistic}")
    if report.fit is not None:
        xs = np.array(report.fit.sizes_used, dtype=float)
        ys = np.exp(report.fit.intercept) * xs ** report.fit.slope
        ax.loglog(xs, ys, "-", lw=1.2, label=f"fit slope {report.fit.slope:.3f}")
    if report.predicted is not None and report.fit is not None:
        xs = np.array(report.fit.sizes_used, dtype=float)
        anchor = np.exp(report.fit.intercept) * xs[0] ** report.fit.slope
        ys = anchor * (xs / xs[0]) ** report.predicted.exponent
        ax.loglog(xs, ys, "--", lw=1.0,
                  label=f"predicted slope {report.predicted.exponent:.3f}")
    ax.set_xlabel("size")
    ax.set_ylabel(report.statistic)
    ax.legend(fontsize=8)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def kink_figure(report, path):
    """Norm-vs-root curves per p alongside the L4/l2 coefficient probe."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    ps = sorted({r.p for r in report.rows})
    for p in ps:
        mine = [r for r in report.rows if r.p == p]
        xs = [r.root for r in mine]
        ys = [r.norm for r in mine]
        root_exp = report.fits[p]["root_exponent"]
        ax1.loglog(xs, ys, "o-", ms=4, lw=1.0, label=f"p={p:g} (slope {root_exp:.3f})")
    ax1.set_xlabel("root count x")
    ax1.set_ylabel("norm")
    ax1.legend(fontsize=8)
    _style(ax1)
    xs = [r[0] for r in report.ratio_rows]
    ys = [r[1] for r in report.ratio_rows]
    ax2.semilogx(xs, ys, "s-", ms=4, lw=1.0,
                 label=f"L4/l2 ratio (slope {report.ratio_slope:.3f})")
    ax2.set_xlabel("root count x")
    ax2.set_ylabel("mean ratio")
    ax2.legend(fontsize=8)
    _style(ax2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
