"""Convergence figures from spiderbench trace CSVs."""

from .frames import EXPECTED_HEADER, SchemaError, TraceFrame, UsageError, split_label
from .figures import (
    PlotResult,
    load_frames,
    loss_floor,
    metric_series,
    plot_comparison,
    plot_two_panel,
    x_series,
)

__all__ = [
    "EXPECTED_HEADER",
    "PlotResult",
    "SchemaError",
    "TraceFrame",
    "UsageError",
    "load_frames",
    "loss_floor",
    "metric_series",
    "plot_comparison",
    "plot_two_panel",
    "split_label",
    "x_series",
]
