"""Benchmark harness: config schema, runs, CSV traces, billing, CLI, reports."""

import json
import os

import numpy as np
import pytest

from spideropt import ConfigError, TraceRow
from spideropt.bench import (
    CSV_HEADER,
    exponent_band,
    load_experiment,
    oscillation_band,
    output_root,
    report_complexity,
    resolve_x0,
    run_experiment,
    sfo_to_target,
    target_metric_for,
    write_trace_csv,
)
from spideropt.bench.cli import main as cli_main


BASE_CONFIG = """
[experiment]
name = "unit"
target_eps = 0.2
seeds = [1, 2]
trace_stride = 1
diagnostics = true
output_dir = "unit"

[problem]
kind = "synthetic-logistic"
n = 30
d = 4
seed = 17
alpha_reg = 0.1

[[solver]]
name = "boost"
algorithm = "spiderboost"
K = 40
"""


def write_config(tmp_path, text, name="exp.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_experiment_round_trip(tmp_path):
    spec = load_experiment(write_config(tmp_path, BASE_CONFIG))
    assert spec.name == "unit"
    assert spec.seeds == [1, 2]
    assert spec.problem["kind"] == "synthetic-logistic"
    assert [s.name for s in spec.solvers] == ["boost"]


def test_unknown_keys_are_named(tmp_path):
    cfg = BASE_CONFIG.replace('name = "unit"', 'name = "unit"\nwalltime = 3')
    with pytest.raises(ConfigError, match="walltime"):
        load_experiment(write_config(tmp_path, cfg))
    cfg = BASE_CONFIG.replace("K = 40", "K = 40\nmomentum = 0.9")
    with pytest.raises(ConfigError, match="momentum"):
        load_experiment(write_config(tmp_path, cfg))


def test_duplicate_solver_names_rejected(tmp_path):
    cfg = BASE_CONFIG + """
[[solver]]
name = "boost"
algorithm = "sarah"
K = 10
"""
    with pytest.raises(ConfigError, match="duplicate"):
        load_experiment(write_config(tmp_path, cfg))


def test_solver_problem_compatibility(tmp_path):
    cfg = BASE_CONFIG.replace('algorithm = "spiderboost"',
                              'algorithm = "prox-spiderboost-o"')
    with pytest.raises(ConfigError, match="online"):
        load_experiment(write_config(tmp_path, cfg))
    cfg2 = BASE_CONFIG.replace(
        'kind = "synthetic-logistic"\nn = 30\nd = 4\nseed = 17\nalpha_reg = 0.1',
        'kind = "log-valley-online"\nsigma = 1.0')
    with pytest.raises(ConfigError):
        load_experiment(write_config(tmp_path, cfg2))


def test_seed_and_reg_validation(tmp_path):
    with pytest.raises(ConfigError, match="seeds"):
        load_experiment(write_config(
            tmp_path, BASE_CONFIG.replace("seeds = [1, 2]", "seeds = [1, 1]")))
    with pytest.raises(ConfigError, match="seeds"):
        load_experiment(write_config(
            tmp_path, BASE_CONFIG.replace("seeds = [1, 2]", "seeds = []")))
    cfg = BASE_CONFIG.replace('algorithm = "spiderboost"',
                              'algorithm = "prox-spiderboost"\nreg = { kind = "l1" }')
    with pytest.raises(ConfigError, match="lam"):
        load_experiment(write_config(tmp_path, cfg))


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_experiment(str(tmp_path / "absent.toml"))
    with pytest.raises(ConfigError, match="parse error"):
        load_experiment(write_config(tmp_path, "[experiment\nname ="))


def test_resolve_x0_broadcast_and_shape():
    assert np.array_equal(resolve_x0(3.0, 4), np.full(4, 3.0))
    assert np.array_equal(resolve_x0([1.0, 2.0], 2), np.array([1.0, 2.0]))
    assert resolve_x0(None, 3) is None
    with pytest.raises(ConfigError):
        resolve_x0([1.0, 2.0], 3)


def test_empty_solver_list_is_a_no_op(tmp_path):
    cfg = BASE_CONFIG.split("[[solver]]")[0]
    result = run_experiment(write_config(tmp_path, cfg), root=str(tmp_path))
    assert result.exit_code == 0
    assert result.summary["cells"] == []
    assert os.path.exists(result.summary_path)


def test_run_writes_traces_and_reconciled_billing(tmp_path):
    result = run_experiment(write_config(tmp_path, BASE_CONFIG),
                            root=str(tmp_path))
    assert result.exit_code == 0
    assert len(result.summary["cells"]) == 2
    for cell in result.summary["cells"]:
        assert cell["billing"]["reconciled"]
        trace_path = os.path.join(result.out_dir, cell["trace_file"])
        with open(trace_path) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == cell["rows"] + 1


def test_repeat_runs_are_identical_modulo_wall_time(tmp_path):
    cfg = write_config(tmp_path, BASE_CONFIG)
    r1 = run_experiment(cfg, root=str(tmp_path / "a"))
    r2 = run_experiment(cfg, root=str(tmp_path / "b"))

    def strip_wall(path):
        with open(path) as fh:
            lines = fh.read().splitlines()
        return [",".join(line.split(",")[:-1]) for line in lines]

    for cell in r1.summary["cells"]:
        a = strip_wall(os.path.join(r1.out_dir, cell["trace_file"]))
        b = strip_wall(os.path.join(r2.out_dir, cell["trace_file"]))
        assert a == b


def test_trace_floats_round_trip_exactly(tmp_path):
    rows = [TraceRow(k=0, sfo=30, po=0, vnorm=1.0 / 3.0, gradnorm=0.1 + 0.2,
                     loss=None, gnorm_eta=None, wall_ms=1.25)]
    path = tmp_path / "t.csv"
    write_trace_csv(str(path), rows)
    line = path.read_text().splitlines()[1].split(",")
    assert float(line[3]) == 1.0 / 3.0
    assert float(line[4]) == 0.1 + 0.2
    assert line[5] == "" and line[6] == ""


def test_sfo_to_target_crossing_is_inclusive():
    rows = [TraceRow(k=0, sfo=10, po=0, vnorm=1.0, gradnorm=0.5),
            TraceRow(k=1, sfo=20, po=0, vnorm=1.0, gradnorm=0.2),
            TraceRow(k=2, sfo=30, po=0, vnorm=1.0, gradnorm=0.1)]
    assert sfo_to_target(rows, 0.2, "gradnorm") == (20, 1)
    assert sfo_to_target(rows, 0.05, "gradnorm") == (None, None)
    assert sfo_to_target(rows, 0.2, "gnorm_eta") == (None, None)


def test_target_metric_choice():
    assert target_metric_for("spiderboost") == "gradnorm"
    assert target_metric_for("sarah") == "gradnorm"
    assert target_metric_for("prox-spiderboost") == "gnorm_eta"
    assert target_metric_for("prox-spiderboost-o") == "gnorm_eta"


def test_output_root_env_var(monkeypatch, tmp_path):
    monkeypatch.setenv("SPIDERBENCH_OUTPUT_ROOT", str(tmp_path))
    assert output_root() == str(tmp_path)
    monkeypatch.delenv("SPIDERBENCH_OUTPUT_ROOT")
    assert output_root() == os.getcwd()


def test_aborted_cell_is_recorded_and_run_continues(tmp_path):
    cfg = """
[experiment]
name = "aborting"
target_eps = 0.1
seeds = [1]
output_dir = "aborting"

[problem]
kind = "planted-lasso"
n = 60
d = 8
seed = 5
nnz = 3

[[solver]]
name = "diverge"
algorithm = "spiderboost"
eta = 50.0
K = 4000

[[solver]]
name = "ok"
algorithm = "spiderboost"
K = 20
"""
    with np.errstate(over="ignore", invalid="ignore"):
        result = run_experiment(write_config(tmp_path, cfg), root=str(tmp_path))
    assert result.exit_code == 2
    assert result.summary["aborts"] == 1
    by_name = {c["solver"]: c for c in result.summary["cells"]}
    assert "error" in by_name["diverge"]
    assert by_name["diverge"]["abort_k"] >= 0
    assert by_name["ok"]["billing"]["reconciled"]


def _summary_file(tmp_path, name, eps, solver_cells):
    payload = {"experiment": {"target_eps": eps}, "cells": solver_cells,
               "aborts": 0}
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _cells(solver, algorithm, sfos, eps):
    return [{"solver": solver, "algorithm": algorithm, "seed": i,
             "target_eps": eps, "sfo_to_target": v}
            for i, v in enumerate(sfos)]


def test_report_complexity_two_point_fit(tmp_path):
    coarse = _summary_file(tmp_path, "e02.json", 0.2,
                           _cells("boost", "spiderboost", [100, 120, 110], 0.2))
    fine = _summary_file(tmp_path, "e01.json", 0.1,
                         _cells("boost", "spiderboost", [400, 480, 440], 0.1))
    report = report_complexity([coarse, fine])
    scaling = report.solvers[0]
    assert scaling.solver == "boost"
    # median ratio 4 over a halving of eps: exponent exactly 2
    assert scaling.exponent == pytest.approx(2.0, rel=1e-12)
    assert scaling.within_band
    assert "exponent" in report.render()


def test_report_complexity_requires_two_distinct_levels(tmp_path):
    one = _summary_file(tmp_path, "a.json", 0.2,
                        _cells("boost", "spiderboost", [100], 0.2))
    with pytest.raises(ConfigError, match="insufficient"):
        report_complexity([one])
    twin = _summary_file(tmp_path, "b.json", 0.2,
                         _cells("boost", "spiderboost", [90], 0.2))
    with pytest.raises(ConfigError, match="distinct"):
        report_complexity([one, twin])


def test_report_skips_errored_cells_and_counts_unreached(tmp_path):
    coarse = _summary_file(
        tmp_path, "c.json", 0.2,
        _cells("boost", "spiderboost", [100, 110, None], 0.2)
        + [{"solver": "boost", "algorithm": "spiderboost", "seed": 9,
            "target_eps": 0.2, "error": "aborted"}])
    fine = _summary_file(tmp_path, "d.json", 0.1,
                         _cells("boost", "spiderboost", [400, 420], 0.1))
    report = report_complexity([coarse, fine])
    point = [p for p in report.solvers[0].points if p.eps == 0.2][0]
    assert point.cells == 3  # the errored cell is excluded entirely
    assert point.reached == 2
    # The unreached cell pads in as +inf, pulling the median to 110.
    assert point.median_sfo == 110.0


def test_exponent_bands():
    assert exponent_band("spiderboost") == (np.log2(2.4), np.log2(6.7))
    assert exponent_band("prox-spiderboost") == (np.log2(2.4), np.log2(6.7))
    assert exponent_band("prox-spiderboost-o") == (2.0, 4.0)


def test_oscillation_band_windows_from_first_crossing():
    eps = 0.1
    values = [0.5, 0.3, 0.09, 0.15, 0.12, 0.06]
    rows = [TraceRow(k=i, sfo=10 * i, po=0, vnorm=v, gradnorm=v)
            for i, v in enumerate(values)]
    check = oscillation_band(rows, eps)
    assert check.crossed and check.in_band
    assert check.first_k == 2
    assert check.post_min == 0.06 and check.post_max == 0.15

    escaped = [0.5, 0.08, 0.30]  # 0.30 > 2 * eps
    check2 = oscillation_band(escaped, eps)
    assert check2.crossed and not check2.in_band

    never = [0.5, 0.4, 0.3]
    check3 = oscillation_band(never, eps)
    assert not check3.crossed and not check3.in_band


def test_cli_exit_codes(tmp_path, capsys):
    cfg = write_config(tmp_path, BASE_CONFIG)
    assert cli_main(["validate", cfg]) == 0
    out = capsys.readouterr().out
    assert "boost" in out

    assert cli_main(["run", cfg, "--output-root", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "wrote" in out
    summary = str(tmp_path / "out" / "unit" / "summary.json")
    assert os.path.exists(summary)

    bad = write_config(tmp_path, BASE_CONFIG.replace("K = 40", "K = 40\nbogus = 1"),
                       name="bad.toml")
    assert cli_main(["validate", bad]) == 1
    err = capsys.readouterr().err
    assert "error:" in err

    assert cli_main(["report", summary]) == 1
    err = capsys.readouterr().err
    assert "insufficient" in err
