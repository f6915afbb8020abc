"""Experiment harness: builds the problem, runs every (solver, seed) cell,
writes one trace CSV per cell plus one summary JSON per experiment, and
reconciles the oracle ledgers against their closed forms.

Artifacts land under $SPIDERBENCH_OUTPUT_ROOT (default: the working
directory) / the experiment's output_dir. Files are written atomically.
CSV schema (exact header): k,sfo,po,vnorm,gradnorm,loss,gnorm_eta,wall_ms
with empty fields where a metric is undefined for that solver. Re-running a
config reproduces the CSVs byte for byte except the wall_ms column.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass

from .. import composite as composite_mod
from .. import smooth as smooth_mod
from ..errors import ConfigError, SolverAbort
from ..ledger import epoch_convention_total
from .config import (COMPOSITE_ALGOS, ExperimentSpec, SolverSpec,
                     build_geometry, build_problem, build_regularizer,
                     load_experiment, resolve_x0)

CSV_HEADER = "k,sfo,po,vnorm,gradnorm,loss,gnorm_eta,wall_ms"
OUTPUT_ROOT_ENV = "SPIDERBENCH_OUTPUT_ROOT"


def output_root() -> str:
    return os.environ.get(OUTPUT_ROOT_ENV) or os.getcwd()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace_csv(path: str, rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join((
            _fmt(r.k), _fmt(r.sfo), _fmt(r.po), _fmt(r.vnorm),
            _fmt(r.gradnorm), _fmt(r.loss), _fmt(r.gnorm_eta),
            _fmt(r.wall_ms))))
    _atomic_write(path, "\n".join(lines) + "\n")


def target_metric_for(algorithm: str) -> str:
    """The stationarity column used for target crossings: the true gradient
    norm for smooth solvers, the generalized gradient norm for composites."""
    return "gnorm_eta" if algorithm in COMPOSITE_ALGOS else "gradnorm"


def sfo_to_target(rows, eps: float, metric: str):
    """(sfo, k) at the first recorded row with metric <= eps; (None, None)
    when the target is never reached or the metric was not recorded."""
    if eps is None:
        return None, None
    for r in rows:
        value = getattr(r, metric)
        if value is not None and value <= eps:
            return r.sfo, r.k
    return None, None


def billing_summary(trace) -> dict:
    """Ledger totals under both conventions plus the closed-form cross-check.

    Per-index billing charges what was actually evaluated: anchors cost their
    batch size, each inner update costs 2*s2. The epoch convention prices
    every iteration at s2 on top of the anchors: anchors*batch + iters*s2.
    """
    md = trace.metadata
    ledger = trace.ledgers.algorithm
    iters = md["iterations_run"]
    anchors = md["anchors_run"]
    batch = md["anchor_batch"]
    s2 = md["s2"]
    if md.get("mode") == "gradient-dominance":
        # Boundary anchors sit outside the iteration count; each epoch's first
        # iteration reuses its anchor, so inner draws = iters - epochs_run.
        inner = iters - md["epochs_run"]
    else:
        inner = iters - anchors
    expected = anchors * batch + 2 * s2 * inner
    return {
        "per_index": ledger.component_gradient_evals,
        "per_index_closed_form": expected,
        "reconciled": ledger.component_gradient_evals == expected,
        "epoch_convention": epoch_convention_total(anchors, iters, batch, s2),
        "po": ledger.prox_calls,
        "anchors_run": anchors,
        "iterations_run": iters,
    }


def make_config(problem, solver: SolverSpec, seed: int, spec: ExperimentSpec):
    """Translate one [[solver]] table into a solver config object."""
    o = dict(solver.options)
    common = dict(
        target_eps=o.pop("target_eps", spec.target_eps),
        eta=o.pop("eta", None), q=o.pop("q", None), s2=o.pop("s2", None),
        K=o.pop("K", None), seed=seed,
        x0=resolve_x0(o.pop("x0", None), problem.d),
        sampling=o.pop("sampling", None),
        trace_stride=o.pop("trace_stride", spec.trace_stride),
        diagnostics=o.pop("diagnostics", spec.diagnostics),
        f_star=o.pop("f_star", None),
    )
    if solver.is_composite:
        cfg = composite_mod.CompositeSolverConfig(
            mode=COMPOSITE_ALGOS[solver.algorithm],
            s1=o.pop("s1", None), epochs=o.pop("epochs", None),
            tau=o.pop("tau", None),
            gd_epoch_constant=o.pop("gd_epoch_constant", 128.0),
            sigma_sq=o.pop("sigma_sq", None),
            geometry=build_geometry(o.pop("geometry", None)),
            reg=build_regularizer(o.pop("reg", None)),
            **common)
    else:
        cfg = smooth_mod.SmoothSolverConfig(
            algorithm=solver.algorithm,
            output_rule=o.pop("output_rule", None),
            stop_at_target=o.pop("stop_at_target", True),
            **common)
    if o:
        raise ConfigError(f"solver {solver.name!r}: unhandled option(s) {sorted(o)}")
    return cfg


def run_cell(problem, solver: SolverSpec, seed: int, spec: ExperimentSpec):
    cfg = make_config(problem, solver, seed, spec)
    if solver.is_composite:
        return composite_mod.run_composite(problem, cfg)
    return smooth_mod.run_smooth(problem, cfg)


def resolve_cell(problem, solver: SolverSpec, seed: int, spec: ExperimentSpec):
    """Dry-run config resolution (validation without any oracle calls)."""
    cfg = make_config(problem, solver, seed, spec)
    if not solver.is_composite:
        return smooth_mod._resolve(problem, cfg)
    mode = COMPOSITE_ALGOS[solver.algorithm]
    if mode == "finite-sum":
        return composite_mod._resolve_finite_sum(problem, cfg)
    if mode == "online":
        return composite_mod._resolve_online(problem, cfg)
    return composite_mod._resolve_gd(problem, cfg)


@dataclass
class ExperimentResult:
    exit_code: int
    out_dir: str
    summary_path: str
    summary: dict


def _experiment_echo(spec: ExperimentSpec) -> dict:
    return {
        "name": spec.name, "target_eps": spec.target_eps, "seeds": spec.seeds,
        "trace_stride": spec.trace_stride, "diagnostics": spec.diagnostics,
        "output_dir": spec.output_dir, "problem": spec.problem,
        "solvers": [{"name": s.name, "algorithm": s.algorithm, **s.options}
                    for s in spec.solvers],
    }


def run_experiment(config_path, root: str = None) -> ExperimentResult:
    """Run every (solver, seed) cell of the config. Aborted cells are recorded
    in the summary and the remaining cells still run; the exit code is then 2.
    """
    spec = load_experiment(config_path)
    problem = build_problem(spec)
    base = root if root is not None else output_root()
    out_dir = spec.output_dir if os.path.isabs(spec.output_dir) \
        else os.path.join(base, spec.output_dir)
    os.makedirs(out_dir, exist_ok=True)

    cells = []
    aborted = 0
    for solver in spec.solvers:
        metric = target_metric_for(solver.algorithm)
        for seed in spec.seeds:
            cell = {"solver": solver.name, "algorithm": solver.algorithm,
                    "seed": seed}
            try:
                _, trace = run_cell(problem, solver, seed, spec)
            except SolverAbort as exc:
                aborted += 1
                cell["error"] = str(exc)
                cell["abort_k"] = exc.k
                cells.append(cell)
                continue
            trace_name = f"{solver.name}_seed{seed}.csv"
            write_trace_csv(os.path.join(out_dir, trace_name), trace.rows)
            eps = trace.metadata.get("target_eps")
            if eps is None:
                eps = spec.target_eps
            sfo_at, k_at = sfo_to_target(trace.rows, eps, metric)
            cell.update({
                "trace_file": trace_name,
                "terminated": trace.terminated,
                "output_index": trace.output_index,
                "final_gradnorm": trace.final_gradnorm,
                "final_gnorm_eta": trace.final_gnorm_eta,
                "target_metric": metric,
                "target_eps": eps,
                "sfo_to_target": sfo_at,
                "k_at_target": k_at,
                "rows": len(trace.rows),
                "ledgers": {"algorithm": trace.ledgers.algorithm.as_dict(),
                            "diagnostic": trace.ledgers.diagnostic.as_dict()},
                "billing": billing_summary(trace),
                "metadata": trace.metadata,
            })
            cells.append(cell)

    summary = {"experiment": _experiment_echo(spec), "cells": cells,
               "aborts": aborted}
    summary_path = os.path.join(out_dir, "summary.json")
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return ExperimentResult(exit_code=2 if aborted else 0, out_dir=out_dir,
                            summary_path=summary_path, summary=summary)


def validate_experiment(config_path) -> list:
    """Full schema + resolution check without running anything. Returns one
    human-readable line per solver."""
    spec = load_experiment(config_path)
    problem = build_problem(spec)
    lines = [f"experiment {spec.name!r}: problem {getattr(problem, 'name', '?')} "
             f"ok, {len(spec.solvers)} solver(s), {len(spec.seeds)} seed(s)"]
    for solver in spec.solvers:
        r = resolve_cell(problem, solver, spec.seeds[0], spec)
        bits = [f"eta={r.eta:g}", f"q={r.q}", f"s2={r.s2}"]
        if getattr(r, "s1", None):
            bits.append(f"s1={r.s1}")
        if getattr(r, "epochs", None):
            bits.append(f"epochs={r.epochs}")
        else:
            bits.append(f"K={r.K}")
        lines.append(f"solver {solver.name!r} ({solver.algorithm}): "
                     + ", ".join(bits))
    return lines
