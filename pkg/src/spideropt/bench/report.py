"""Complexity reports across experiments and trace-level trend checks.

report_complexity fits, per solver, the exponent p of SFO-at-target ~ eps^-p
from summaries produced at two or more target levels, and flags exponents
outside the declared desk-scale band: finite-sum solvers should sit inside
[log2(2.4), log2(6.7)] (the eps^-2 law with measurement slack), online
solvers inside [2, 4] (the eps^-3 law)."""

import json
import math
import statistics
from dataclasses import dataclass

from ..errors import ConfigError

FINITE_SUM_BAND = (math.log2(2.4), math.log2(6.7))
ONLINE_BAND = (2.0, 4.0)


def exponent_band(algorithm: str) -> tuple:
    return ONLINE_BAND if algorithm.endswith("-o") else FINITE_SUM_BAND


def load_summary(path) -> dict:
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"summary not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"summary {path} is not valid JSON: {exc}") from exc


@dataclass
class ScalingPoint:
    eps: float
    median_sfo: float
    reached: int
    cells: int


@dataclass
class SolverScaling:
    solver: str
    algorithm: str
    points: list
    unreachable: list
    exponent: float
    band: tuple
    within_band: bool


@dataclass
class ComplexityReport:
    solvers: list

    def render(self) -> str:
        lines = []
        for s in self.solvers:
            lines.append(f"{s.solver} ({s.algorithm})")
            for p in sorted(s.points, key=lambda p: -p.eps):
                lines.append(f"  eps={p.eps:g}: median SFO-at-target "
                             f"{p.median_sfo:g} ({p.reached}/{p.cells} cells reached)")
            for eps in s.unreachable:
                lines.append(f"  eps={eps:g}: target unreachable in every cell")
            if s.exponent is None:
                lines.append("  exponent: not fit (fewer than 2 reachable levels)")
            else:
                lo, hi = s.band
                verdict = "within" if s.within_band else "OUTSIDE"
                lines.append(f"  fitted exponent p={s.exponent:.3f} "
                             f"({verdict} band [{lo:.3f}, {hi:.3f}])")
        return "\n".join(lines)


def _median_sfo(cells) -> tuple:
    values = [c["sfo_to_target"] for c in cells]
    reached = [v for v in values if v is not None]
    if not reached:
        return None, 0, len(values)
    # Unreached cells count as +inf so the median is honest about them.
    padded = sorted(reached) + [math.inf] * (len(values) - len(reached))
    med = statistics.median(padded)
    return (None if math.isinf(med) else float(med)), len(reached), len(values)


def report_complexity(summary_paths, eps_values=None) -> ComplexityReport:
    """Scaling table across >= 2 summaries of the same solver set at distinct
    target levels."""
    if len(summary_paths) < 2:
        raise ConfigError("insufficient points: need at least 2 summaries at "
                          "distinct target_eps values")
    by_solver = {}
    algos = {}
    seen_eps = set()
    for path in summary_paths:
        summary = load_summary(path)
        eps = summary.get("experiment", {}).get("target_eps")
        if eps is None:
            raise ConfigError(f"summary {path} has no experiment.target_eps")
        eps = float(eps)
        if eps_values is not None and not any(math.isclose(eps, e) for e in eps_values):
            continue
        seen_eps.add(eps)
        groups = {}
        for cell in summary.get("cells", []):
            if "error" in cell:
                continue
            groups.setdefault(cell["solver"], []).append(cell)
            algos[cell["solver"]] = cell["algorithm"]
        for solver, cells in groups.items():
            med, reached, total = _median_sfo(cells)
            by_solver.setdefault(solver, []).append(
                ScalingPoint(eps=eps, median_sfo=med, reached=reached,
                             cells=total))
    if eps_values is not None:
        missing = [e for e in eps_values
                   if not any(math.isclose(e, s) for s in seen_eps)]
        if missing:
            raise ConfigError(f"no summary found at target_eps {missing}")
    if len(seen_eps) < 2:
        raise ConfigError("insufficient points: the summaries cover fewer than "
                          "2 distinct target_eps values")

    solvers = []
    for solver, points in sorted(by_solver.items()):
        usable = [p for p in points if p.median_sfo is not None]
        unreachable = [p.eps for p in points if p.median_sfo is None]
        exponent = None
        band = exponent_band(algos[solver])
        within = False
        if len(usable) >= 2:
            xs = [math.log(1.0 / p.eps) for p in usable]
            ys = [math.log(p.median_sfo) for p in usable]
            xbar = sum(xs) / len(xs)
            ybar = sum(ys) / len(ys)
            denom = sum((x - xbar) ** 2 for x in xs)
            if denom == 0:
                raise ConfigError(f"solver {solver!r}: summaries share one "
                                  "target_eps; need distinct levels")
            exponent = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom
            within = band[0] <= exponent <= band[1]
        solvers.append(SolverScaling(solver=solver, algorithm=algos[solver],
                                     points=usable, unreachable=unreachable,
                                     exponent=exponent, band=band,
                                     within_band=within))
    return ComplexityReport(solvers=solvers)


@dataclass
class OscillationCheck:
    crossed: bool
    in_band: bool
    first_k: int
    post_min: float
    post_max: float


def oscillation_band(rows, eps: float, metric: str = "gradnorm",
                     low: float = 0.5, high: float = 2.0) -> OscillationCheck:
    """Checks that once the metric first drops to eps, every later recorded
    value stays inside [low*eps, high*eps] (crossing row included)."""
    first_k = None
    post = []
    for r in rows:
        value = getattr(r, metric) if not isinstance(r, (int, float)) else r
        if value is None:
            continue
        if first_k is None and value <= eps:
            first_k = getattr(r, "k", len(post))
        if first_k is not None:
            post.append(float(value))
    if first_k is None:
        return OscillationCheck(False, False, None, None, None)
    lo, hi = min(post), max(post)
    return OscillationCheck(True, low * eps <= lo and hi <= high * eps,
                            first_k, lo, hi)
