"""Experiment config parsing and validation.

The config is one TOML file:

    [experiment]
    name = "fig1"                # default "experiment"
    target_eps = 0.1             # optional; default target for sfo-to-target
    seeds = [0, 1, 2]            # algorithm seeds, one run cell per seed
    trace_stride = 1             # default row stride for all solvers
    diagnostics = true           # record true gradient norms / losses
    output_dir = "fig1"          # under $SPIDERBENCH_OUTPUT_ROOT (or cwd)

    [problem]
    kind = "synthetic-logistic"  # see PROBLEM_KINDS
    n = 1000
    d = 100
    seed = 17
    alpha_reg = 0.1

    [[solver]]
    name = "spiderboost"         # unique label, used in file names
    algorithm = "spiderboost"    # see SMOOTH_ALGOS / COMPOSITE_MODES
    eta = 0.5
    # any solver-config field; reg = { kind = "l1", lam = 0.1 };
    # geometry = "euclidean" | "entropy"

Everything is schema-checked before any run: unknown keys, bad types, and
solver/problem mismatches are rejected with the offending key named.
"""

import os
import re
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from ..errors import ConfigError
from ..families import ValleyOracle, ValleyProblem, planted_least_squares
from ..problems import (FiniteSumOnlineOracle, generate_synthetic_logistic,
                        load_libsvm_problem)
from ..proximal import (BoxIndicator, EntropyGeometry, EuclideanGeometry,
                        L1Regularizer, ZeroRegularizer)

SMOOTH_ALGOS = ("sarah", "spider", "spiderboost")
COMPOSITE_ALGOS = {
    "prox-spiderboost": "finite-sum",
    "prox-spiderboost-gd": "gradient-dominance",
    "prox-spiderboost-o": "online",
}
ONLINE_PROBLEM_KINDS = ("log-valley-online", "logistic-pool-online")
PROBLEM_KINDS = ("synthetic-logistic", "libsvm", "planted-lasso",
                 "log-valley") + ONLINE_PROBLEM_KINDS

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")
_EXPERIMENT_KEYS = {"name", "target_eps", "seeds", "trace_stride",
                    "diagnostics", "output_dir"}
_PROBLEM_KEYS = {
    "synthetic-logistic": {"kind", "n", "d", "seed", "alpha_reg"},
    "libsvm": {"kind", "path", "alpha_reg", "sparse"},
    "planted-lasso": {"kind", "n", "d", "seed", "nnz", "coeff_scale", "noise"},
    "log-valley": {"kind", "n", "kappa"},
    "log-valley-online": {"kind", "sigma"},
    "logistic-pool-online": {"kind", "n", "d", "seed", "alpha_reg", "sigma_sq"},
}
_SOLVER_COMMON_KEYS = {"name", "algorithm", "eta", "q", "s2", "K",
                       "target_eps", "trace_stride", "diagnostics", "x0",
                       "sampling", "f_star"}
_SOLVER_SMOOTH_KEYS = _SOLVER_COMMON_KEYS | {"output_rule", "stop_at_target"}
_SOLVER_COMPOSITE_KEYS = _SOLVER_COMMON_KEYS | {
    "s1", "epochs", "tau", "gd_epoch_constant", "sigma_sq", "reg", "geometry"}


@dataclass
class SolverSpec:
    name: str
    algorithm: str
    options: dict = field(default_factory=dict)

    @property
    def is_online(self) -> bool:
        return self.algorithm == "prox-spiderboost-o"

    @property
    def is_composite(self) -> bool:
        return self.algorithm in COMPOSITE_ALGOS


@dataclass
class ExperimentSpec:
    name: str
    target_eps: float
    seeds: list
    trace_stride: int
    diagnostics: bool
    output_dir: str
    problem: dict
    solvers: list
    source_path: str = None


def _require_keys(table: dict, allowed: set, where: str):
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}; "
                          f"allowed: {sorted(allowed)}")


def _as_int(table, key, where, default=None, minimum=None):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {v}")
    return v


def _as_float(table, key, where, default=None):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def _as_bool(table, key, where, default=None):
    if key not in table:
        return default
    v = table[key]
    if not isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be a boolean, got {v!r}")
    return v


def _as_str(table, key, where, default=None, choices=None):
    if key not in table:
        return default
    v = table[key]
    if not isinstance(v, str):
        raise ConfigError(f"{where}.{key} must be a string, got {v!r}")
    if choices is not None and v not in choices:
        raise ConfigError(f"{where}.{key} must be one of {sorted(choices)}, got {v!r}")
    return v


def load_experiment(path) -> ExperimentSpec:
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    _require_keys(raw, {"experiment", "problem", "solver"}, "config")
    exp = raw.get("experiment", {})
    if not isinstance(exp, dict):
        raise ConfigError("[experiment] must be a table")
    _require_keys(exp, _EXPERIMENT_KEYS, "[experiment]")
    name = _as_str(exp, "name", "[experiment]", default="experiment")
    target_eps = _as_float(exp, "target_eps", "[experiment]")
    if target_eps is not None and not target_eps > 0:
        raise ConfigError(f"[experiment].target_eps must be positive, got {target_eps}")
    seeds = exp.get("seeds", [0])
    if (not isinstance(seeds, list) or len(seeds) == 0
            or any(isinstance(s, bool) or not isinstance(s, int) for s in seeds)):
        raise ConfigError("[experiment].seeds must be a nonempty list of integers")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("[experiment].seeds contains duplicates")
    trace_stride = _as_int(exp, "trace_stride", "[experiment]", default=1, minimum=1)
    diagnostics = _as_bool(exp, "diagnostics", "[experiment]", default=True)
    output_dir = _as_str(exp, "output_dir", "[experiment]", default=name)

    if "problem" not in raw or not isinstance(raw["problem"], dict):
        raise ConfigError("config needs a [problem] table")
    problem = dict(raw["problem"])
    kind = _as_str(problem, "kind", "[problem]", choices=set(PROBLEM_KINDS))
    if kind is None:
        raise ConfigError(f"[problem].kind is required; one of {PROBLEM_KINDS}")
    _require_keys(problem, _PROBLEM_KEYS[kind], "[problem]")

    solver_tables = raw.get("solver", [])
    if isinstance(solver_tables, dict):
        solver_tables = [solver_tables]
    if not isinstance(solver_tables, list):
        raise ConfigError("[[solver]] must be an array of tables")
    solvers = []
    seen = set()
    for idx, table in enumerate(solver_tables):
        if not isinstance(table, dict):
            raise ConfigError(f"[[solver]] entry {idx} must be a table")
        where = f"[[solver]] entry {idx}"
        algorithm = _as_str(table, "algorithm", where,
                            choices=set(SMOOTH_ALGOS) | set(COMPOSITE_ALGOS))
        if algorithm is None:
            raise ConfigError(f"{where}: algorithm is required")
        allowed = _SOLVER_COMPOSITE_KEYS if algorithm in COMPOSITE_ALGOS \
            else _SOLVER_SMOOTH_KEYS
        _require_keys(table, allowed, where)
        sname = _as_str(table, "name", where, default=algorithm)
        if not _NAME_RE.match(sname):
            raise ConfigError(f"solver name {sname!r} must match [A-Za-z0-9._-]+ "
                              "(it becomes a file name)")
        if sname in seen:
            raise ConfigError(f"duplicate solver name {sname!r}")
        seen.add(sname)
        online_solver = algorithm == "prox-spiderboost-o"
        if online_solver != (kind in ONLINE_PROBLEM_KINDS):
            need = "an online oracle" if online_solver else "a finite-sum problem"
            raise ConfigError(f"solver {sname!r} ({algorithm}) needs {need}; "
                              f"problem kind is {kind!r}")
        options = {k: v for k, v in table.items() if k not in ("name", "algorithm")}
        _validate_solver_options(options, where)
        solvers.append(SolverSpec(name=sname, algorithm=algorithm, options=options))

    return ExperimentSpec(name=name, target_eps=target_eps, seeds=list(seeds),
                          trace_stride=trace_stride, diagnostics=diagnostics,
                          output_dir=output_dir, problem=problem,
                          solvers=solvers, source_path=path)


def _validate_solver_options(options: dict, where: str):
    for key in ("eta", "target_eps", "tau", "gd_epoch_constant", "sigma_sq",
                "f_star"):
        _as_float(options, key, where)
    for key, minimum in (("q", 1), ("s1", 1), ("s2", 1), ("K", 1),
                         ("epochs", 1), ("trace_stride", 1)):
        _as_int(options, key, where, minimum=minimum)
    for key in ("diagnostics", "stop_at_target"):
        _as_bool(options, key, where)
    _as_str(options, "output_rule", where,
            choices={"random-iterate", "first-small-vk", "last-iterate"})
    _as_str(options, "sampling", where,
            choices={"with-replacement", "without-replacement"})
    _as_str(options, "geometry", where, choices={"euclidean", "entropy"})
    if "x0" in options:
        x0 = options["x0"]
        scalar = isinstance(x0, (int, float)) and not isinstance(x0, bool)
        vector = (isinstance(x0, list) and len(x0) > 0 and
                  all(isinstance(v, (int, float)) and not isinstance(v, bool)
                      for v in x0))
        if not (scalar or vector):
            raise ConfigError(f"{where}.x0 must be a number or list of numbers")
    if "reg" in options:
        reg = options["reg"]
        if not isinstance(reg, dict):
            raise ConfigError(f"{where}.reg must be a table like "
                              "{ kind = \"l1\", lam = 0.1 }")
        rkind = _as_str(reg, "kind", f"{where}.reg",
                        choices={"zero", "l1", "box"})
        if rkind is None:
            raise ConfigError(f"{where}.reg.kind is required")
        allowed = {"zero": {"kind"}, "l1": {"kind", "lam"},
                   "box": {"kind", "lo", "hi"}}[rkind]
        _require_keys(reg, allowed, f"{where}.reg")
        if rkind == "l1" and _as_float(reg, "lam", f"{where}.reg") is None:
            raise ConfigError(f"{where}.reg.lam is required for l1")
        if rkind == "box" and (_as_float(reg, "lo", f"{where}.reg") is None or
                               _as_float(reg, "hi", f"{where}.reg") is None):
            raise ConfigError(f"{where}.reg needs lo and hi for box")


def build_problem(spec: ExperimentSpec):
    """Instantiate the problem or oracle described by [problem]."""
    p = spec.problem
    kind = p["kind"]
    where = "[problem]"
    if kind == "synthetic-logistic":
        return generate_synthetic_logistic(
            n=_as_int(p, "n", where, default=1000, minimum=1),
            d=_as_int(p, "d", where, default=100, minimum=1),
            seed=_as_int(p, "seed", where, default=17),
            alpha_reg=_as_float(p, "alpha_reg", where, default=0.0))
    if kind == "libsvm":
        path = _as_str(p, "path", where)
        if path is None:
            raise ConfigError("[problem].path is required for libsvm")
        if not os.path.isabs(path) and spec.source_path:
            path = os.path.join(os.path.dirname(os.path.abspath(spec.source_path)), path)
        return load_libsvm_problem(path, alpha_reg=_as_float(p, "alpha_reg", where,
                                                             default=0.0))
    if kind == "planted-lasso":
        return planted_least_squares(
            n=_as_int(p, "n", where, default=400, minimum=1),
            d=_as_int(p, "d", where, default=50, minimum=1),
            seed=_as_int(p, "seed", where, default=5),
            nnz=_as_int(p, "nnz", where, default=10, minimum=1),
            coeff_scale=_as_float(p, "coeff_scale", where, default=3.0),
            noise=_as_float(p, "noise", where, default=0.05))
    if kind == "log-valley":
        return ValleyProblem(n=_as_int(p, "n", where, default=64, minimum=2),
                             kappa=_as_float(p, "kappa", where, default=0.05))
    if kind == "log-valley-online":
        return ValleyOracle(sigma=_as_float(p, "sigma", where, default=1.0))
    if kind == "logistic-pool-online":
        pool = generate_synthetic_logistic(
            n=_as_int(p, "n", where, default=1000, minimum=1),
            d=_as_int(p, "d", where, default=100, minimum=1),
            seed=_as_int(p, "seed", where, default=17),
            alpha_reg=_as_float(p, "alpha_reg", where, default=0.0))
        return FiniteSumOnlineOracle(pool, sigma_sq=_as_float(p, "sigma_sq", where))
    raise ConfigError(f"unhandled problem kind {kind!r}")


def build_regularizer(table):
    if table is None:
        return ZeroRegularizer()
    kind = table["kind"]
    if kind == "zero":
        return ZeroRegularizer()
    if kind == "l1":
        return L1Regularizer(float(table["lam"]))
    if kind == "box":
        return BoxIndicator(float(table["lo"]), float(table["hi"]))
    raise ConfigError(f"unknown regularizer kind {kind!r}")


def build_geometry(name):
    if name is None or name == "euclidean":
        return EuclideanGeometry()
    if name == "entropy":
        return EntropyGeometry()
    raise ConfigError(f"unknown geometry {name!r}")


def resolve_x0(value, d: int):
    if value is None:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.full(d, float(value))
    arr = np.asarray(value, dtype=float)
    if arr.shape != (d,):
        raise ConfigError(f"x0 has {arr.size} entries, problem dimension is {d}")
    return arr
