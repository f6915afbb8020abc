"""Convergence figures: per-trace curves on a log scale, optional medians."""

import warnings
from dataclasses import dataclass
from typing import List

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .frames import TraceFrame, UsageError

X_AXES = ("epochs", "sfo")
Y_METRICS = ("gradnorm", "loss")


@dataclass
class PlotResult:
    out_path: str
    plotted: List[str]
    skipped: List[str]


def load_frames(traces) -> List[TraceFrame]:
    return [t if isinstance(t, TraceFrame) else TraceFrame.load(t)
            for t in traces]


def loss_floor(frames) -> tuple:
    """f* proxy: min loss over every finite cell on the figure, plus the
    clip applied so the row attaining the min survives the log axis."""
    finite = np.concatenate([
        f.columns["loss"][np.isfinite(f.columns["loss"])] for f in frames
    ]) if frames else np.array([])
    if finite.size == 0:
        return None, None
    f_star = float(finite.min())
    return f_star, 1e-12 * max(1.0, abs(f_star))


def metric_series(frame: TraceFrame, y_metric: str, f_star=None, clip=None):
    if y_metric == "gradnorm":
        return frame.columns["gradnorm"]
    return np.maximum(frame.columns["loss"] - f_star, clip)


def x_series(frame: TraceFrame, x_axis: str, n=None):
    if x_axis == "sfo":
        return frame.columns["sfo"]
    if n is None:
        raise UsageError("x axis 'epochs' divides SFO by the component count; "
                         "pass n (--n) to enable it")
    return frame.columns["sfo"] / float(n)


def _draw(ax, frames, x_axis, y_metric, eps, n, median_overlay):
    plotted, skipped = [], []
    f_star = clip = None
    if y_metric == "loss":
        f_star, clip = loss_floor([f for f in frames if f.has_metric("loss")])
    curves = {}
    for frame in frames:
        if not frame.has_metric(y_metric):
            warnings.warn(f"{frame.label}: no {y_metric} values, curve skipped",
                          RuntimeWarning, stacklevel=3)
            skipped.append(frame.label)
            continue
        x = x_series(frame, x_axis, n)
        y = metric_series(frame, y_metric, f_star, clip)
        keep = np.isfinite(y)
        ax.plot(x[keep], y[keep], linewidth=1.0, alpha=0.8, label=frame.label)
        curves.setdefault(frame.group, []).append((x[keep], y[keep]))
        plotted.append(frame.label)

    if median_overlay:
        for group, members in curves.items():
            if len(members) < 2:
                continue
            grid = np.unique(np.concatenate([x for x, _ in members]))
            stack = np.vstack([np.interp(grid, x, y) for x, y in members])
            ax.plot(grid, np.median(stack, axis=0), linewidth=2.4,
                    linestyle="--", label=f"{group} median")

    if eps is not None and y_metric == "gradnorm":
        ax.axhline(eps, color="gray", linestyle=":", linewidth=1.0,
                   label=f"eps = {eps:g}")
    ax.set_yscale("log")
    ax.set_xlabel("epochs" if x_axis == "epochs" else "SFO calls")
    ax.set_ylabel("gradient norm" if y_metric == "gradnorm" else "loss gap")
    if plotted or eps is not None:
        ax.legend(fontsize=8)
    return plotted, skipped


def plot_comparison(traces, out_path: str, x_axis: str = "sfo",
                    y_metric: str = "gradnorm", eps: float = None,
                    n: int = None, median_overlay: bool = False) -> PlotResult:
    """One figure, one log-scale curve per trace, labeled solver + seed."""
    if x_axis not in X_AXES:
        raise UsageError(f"x axis must be one of {X_AXES}, got {x_axis!r}")
    if y_metric not in Y_METRICS:
        raise UsageError(f"y metric must be one of {Y_METRICS}, got {y_metric!r}")
    frames = load_frames(traces)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    plotted, skipped = _draw(ax, frames, x_axis, y_metric, eps, n,
                             median_overlay)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return PlotResult(out_path=out_path, plotted=plotted, skipped=skipped)


def plot_two_panel(traces, out_path: str, x_axis: str = "sfo",
                   eps: float = None, n: int = None,
                   median_overlay: bool = False) -> PlotResult:
    """Gradient-norm panel next to a loss-gap panel, shared trace set."""
    if x_axis not in X_AXES:
        raise UsageError(f"x axis must be one of {X_AXES}, got {x_axis!r}")
    frames = load_frames(traces)
    fig, (ax_g, ax_l) = plt.subplots(1, 2, figsize=(11.0, 4.2))
    plotted, skipped = _draw(ax_g, frames, x_axis, "gradnorm", eps, n,
                             median_overlay)
    plotted_l, skipped_l = _draw(ax_l, frames, x_axis, "loss", eps, n,
                                 median_overlay)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return PlotResult(out_path=out_path,
                      plotted=sorted(set(plotted) | set(plotted_l)),
                      skipped=sorted(set(skipped) & set(skipped_l)))
