"""Benchmark harness: TOML experiment configs, trace CSVs, scaling reports."""

from .config import (ExperimentSpec, SolverSpec, build_geometry, build_problem,
                     build_regularizer, load_experiment, resolve_x0)
from .harness import (CSV_HEADER, ExperimentResult, billing_summary,
                      output_root, run_cell, run_experiment, sfo_to_target,
                      target_metric_for, validate_experiment, write_trace_csv)
from .report import (ComplexityReport, OscillationCheck, exponent_band,
                     oscillation_band, report_complexity)

__all__ = [
    "CSV_HEADER",
    "ComplexityReport",
    "ExperimentResult",
    "ExperimentSpec",
    "OscillationCheck",
    "SolverSpec",
    "billing_summary",
    "build_geometry",
    "build_problem",
    "build_regularizer",
    "exponent_band",
    "load_experiment",
    "oscillation_band",
    "output_root",
    "report_complexity",
    "resolve_x0",
    "run_cell",
    "run_experiment",
    "sfo_to_target",
    "target_metric_for",
    "validate_experiment",
    "write_trace_csv",
]
