"""Solvers for smooth finite-sum minimization built on the recursive
variance-reduced estimator: a plain-step variant with epoch restarts (sarah),
a normalized-step variant with a first-small-estimate stopping rule (spider),
and the large-stepsize plain-step variant (spiderboost).

All three share one loop: refresh the estimator with a full gradient every q
iterations, advance it with a 2*s2-cost recursive step otherwise, and move
x_{k+1} = x_k - eta * d_k where d_k is v_k (sarah, spiderboost) or v_k/||v_k||
(spider). They differ in stepsize defaults, epoch handling, and output rule.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SolverAbort
from .estimator import SpiderEstimator
from .ledger import LedgerPair
from .problems import FiniteSumProblem, full_gradient, problem_value

SMOOTH_ALGORITHMS = ("sarah", "spider", "spiderboost")
OUTPUT_RULES = ("random-iterate", "first-small-vk", "last-iterate")


def beta1(eta: float, lipschitz_L: float, q: int, s2: int) -> float:
    """Feasibility margin of the plain-step solvers.

    beta1 = eta/2 - L eta^2/2 - eta^3 L^2 q / (2 s2); positive beta1 is what
    the convergence guarantee needs. At eta = 1/(2L) with q = s2 it equals
    1/(16L).
    """
    return (eta / 2.0
            - lipschitz_L * eta ** 2 / 2.0
            - eta ** 3 * lipschitz_L ** 2 * q / (2.0 * s2))


def theorem_iteration_budget(lipschitz_L: float, delta0: float, eps: float) -> int:
    """Default iteration count K = ceil(40 L (f(x0) - f_star) / eps^2)."""
    if not eps > 0:
        raise ConfigError(f"target_eps must be positive, got {eps}")
    if delta0 < 0:
        raise ConfigError(f"initial gap f(x0) - f_star is negative ({delta0}); "
                          "check f_star")
    return max(1, math.ceil(40.0 * lipschitz_L * delta0 / eps ** 2))


@dataclass
class TraceRow:
    """One recorded iteration. gradnorm/loss are diagnostic (true full-batch
    quantities, billed to the diagnostic ledger) and None when disabled;
    gnorm_eta is used by the composite solvers only."""

    k: int
    sfo: int
    po: int
    vnorm: float
    gradnorm: float = None
    loss: float = None
    gnorm_eta: float = None
    wall_ms: float = 0.0


@dataclass
class RunTrace:
    """Filled by every solver. final_gradnorm is the true (or population)
    gradient norm at x_out, None when no such oracle exists; final_gnorm_eta
    is the generalized-gradient norm at x_out for composite runs."""

    rows: list
    x_out: np.ndarray
    output_index: int
    terminated: bool
    final_gradnorm: float
    ledgers: LedgerPair
    metadata: dict = field(default_factory=dict)
    final_gnorm_eta: float = None


@dataclass
class SmoothSolverConfig:
    """Configuration for the smooth solvers. Unset fields resolve to the
    guarantee-backed defaults derived from the problem:

      q = s2 = ceil(sqrt(n));
      eta = 1/(L sqrt(q)) (sarah), target_eps/L (spider), 1/(2L) (spiderboost);
      K = ceil(40 L (f(x0) - f_star) / target_eps^2) (needs problem.f_star);
      sampling = without replacement for sarah, with replacement otherwise;
      output_rule = first-small-vk for spider, random-iterate otherwise.
    """

    algorithm: str
    target_eps: float = None
    eta: float = None
    q: int = None
    s2: int = None
    K: int = None
    seed: int = 0
    x0: np.ndarray = None
    output_rule: str = None
    sampling: str = None
    stop_at_target: bool = True
    trace_stride: int = 1
    diagnostics: bool = False
    f_star: float = None


@dataclass
class _Resolved:
    algorithm: str
    eta: float
    q: int
    s2: int
    K: int
    eps: float
    seed: int
    x0: np.ndarray
    output_rule: str
    sampling: str
    stop_at_target: bool
    trace_stride: int
    diagnostics: bool
    theorem_defaults: bool


def _resolve(problem: FiniteSumProblem, cfg: SmoothSolverConfig) -> _Resolved:
    if cfg.algorithm not in SMOOTH_ALGORITHMS:
        raise ConfigError(f"unknown smooth algorithm {cfg.algorithm!r}; "
                          f"expected one of {SMOOTH_ALGORITHMS}")
    L = problem.lipschitz_L
    n = problem.n

    q = int(cfg.q) if cfg.q is not None else max(1, math.ceil(math.sqrt(n)))
    s2 = int(cfg.s2) if cfg.s2 is not None else max(1, math.ceil(math.sqrt(n)))
    if q < 1:
        raise ConfigError(f"q must be a positive integer, got {q}")
    if s2 < 1:
        raise ConfigError(f"s2 must be a positive integer, got {s2}")

    eps = cfg.target_eps
    if eps is not None and not eps > 0:
        raise ConfigError(f"target_eps must be positive, got {eps}")

    if cfg.eta is not None:
        eta = float(cfg.eta)
    elif cfg.algorithm == "sarah":
        eta = 1.0 / (L * math.sqrt(q))
    elif cfg.algorithm == "spider":
        if eps is None:
            raise ConfigError("spider's default stepsize is target_eps/L; "
                              "set target_eps or eta")
        eta = eps / L
    else:
        eta = 1.0 / (2.0 * L)
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")

    if cfg.K is not None:
        K = int(cfg.K)
    else:
        f_star = cfg.f_star if cfg.f_star is not None else problem.f_star
        if f_star is None:
            raise ConfigError("cannot derive the default iteration budget: "
                              "problem has no known f_star; set K explicitly")
        if eps is None:
            raise ConfigError("cannot derive the default iteration budget "
                              "without target_eps; set K or target_eps")
        x0 = cfg.x0 if cfg.x0 is not None else np.zeros(problem.d)
        delta0 = problem.batch_value(range(n), np.asarray(x0, dtype=float)) - f_star
        K = theorem_iteration_budget(L, delta0, eps)
    if K < 1:
        raise ConfigError(f"K must be a positive integer, got {K}")

    x0 = np.asarray(cfg.x0, dtype=float).copy() if cfg.x0 is not None \
        else np.zeros(problem.d)
    x0 = problem.check_point(x0)

    sampling = cfg.sampling if cfg.sampling is not None else \
        ("without-replacement" if cfg.algorithm == "sarah" else "with-replacement")

    if cfg.algorithm == "spider":
        rule = cfg.output_rule if cfg.output_rule is not None else "first-small-vk"
        if rule != "first-small-vk":
            raise ConfigError("spider's output is the first iterate with a small "
                              "estimate (or the final iterate); other output "
                              "rules do not apply")
        if cfg.stop_at_target and eps is None:
            raise ConfigError("spider needs target_eps for its stopping rule "
                              "(or stop_at_target=False)")
    else:
        rule = cfg.output_rule if cfg.output_rule is not None else "random-iterate"
        if rule not in ("random-iterate", "last-iterate"):
            raise ConfigError(f"output_rule {rule!r} is not valid for "
                              f"{cfg.algorithm}")

    if cfg.trace_stride < 1:
        raise ConfigError(f"trace_stride must be >= 1, got {cfg.trace_stride}")

    theorem_defaults = cfg.eta is None and cfg.q is None and cfg.s2 is None
    if cfg.algorithm == "spiderboost" and theorem_defaults:
        margin = beta1(eta, L, q, s2)
        if not margin > 0:
            raise ConfigError(f"default-parameter feasibility check failed: "
                              f"beta1 = {margin} <= 0")

    return _Resolved(cfg.algorithm, eta, q, s2, K, eps, int(cfg.seed), x0, rule,
                     sampling, cfg.stop_at_target, int(cfg.trace_stride),
                     cfg.diagnostics, theorem_defaults)


def _run_smooth(problem: FiniteSumProblem, r: _Resolved) -> tuple:
    rng = np.random.default_rng(r.seed)
    ledgers = LedgerPair()
    est = SpiderEstimator(q=r.q, s2=r.s2, rng=rng, sampling_mode=r.sampling,
                          ledger=ledgers.algorithm)

    x = r.x0
    xs = [x]
    rows = []
    t0 = time.perf_counter()
    terminated = False
    out_idx = None
    refreshes = 0

    for k in range(r.K):
        if k % r.q == 0:
            refreshes += 1
            if r.algorithm == "sarah" and k > 0:
                # Epoch jump: restart from a uniformly chosen iterate of the
                # finished epoch {k-q+1, ..., k} (the just-computed point is a
                # candidate; q=1 keeps it and degenerates to gradient descent).
                j = int(rng.integers(k - r.q + 1, k + 1))
                x = xs[j]
                xs[k] = x
            anchor = full_gradient(problem, x, ledgers.algorithm)
            est.refresh(anchor, x)
            v = est.v
        else:
            v = est.spider_step(problem, x)
        if not np.all(np.isfinite(v)):
            raise SolverAbort("gradient estimate became non-finite", k=k)
        vnorm = float(np.linalg.norm(v))

        stop_now = r.algorithm == "spider" and (
            vnorm == 0.0 or (r.stop_at_target and vnorm <= r.eps))
        if k % r.trace_stride == 0 or k == r.K - 1 or stop_now:
            gradnorm = loss = None
            if r.diagnostics:
                gradnorm = float(np.linalg.norm(
                    full_gradient(problem, x, ledgers.diagnostic)))
                loss = problem_value(problem, x, ledgers.diagnostic)
            rows.append(TraceRow(
                k=k, sfo=ledgers.algorithm.component_gradient_evals,
                po=ledgers.algorithm.prox_calls, vnorm=vnorm,
                gradnorm=gradnorm, loss=loss,
                wall_ms=(time.perf_counter() - t0) * 1e3))
        if stop_now:
            terminated = True
            out_idx = k
            break

        if r.algorithm == "spider":
            x = x - r.eta * (v / vnorm)
        else:
            x = x - r.eta * v
        if not np.all(np.isfinite(x)):
            raise SolverAbort("iterate became non-finite (overflow)", k=k)
        xs.append(x)

    if r.algorithm == "spider":
        if not terminated:
            out_idx = len(xs) - 1
        x_out = xs[out_idx]
    elif r.output_rule == "last-iterate":
        out_idx = len(xs) - 1
        x_out = xs[out_idx]
        terminated = True
    else:
        out_idx = int(rng.integers(0, r.K))
        x_out = xs[out_idx]
        terminated = True

    final_gradnorm = float(np.linalg.norm(
        full_gradient(problem, x_out, ledgers.diagnostic)))

    metadata = {
        "algorithm": r.algorithm, "problem": problem.name,
        "n": problem.n, "d": problem.d, "lipschitz_L": problem.lipschitz_L,
        "eta": r.eta, "q": r.q, "s2": r.s2, "K": r.K,
        "target_eps": r.eps, "seed": r.seed, "sampling": r.sampling,
        "output_rule": r.output_rule, "stop_at_target": r.stop_at_target,
        "theorem_defaults": r.theorem_defaults,
        "beta1": beta1(r.eta, problem.lipschitz_L, r.q, r.s2),
        "iterations_run": k + 1, "anchors_run": refreshes,
        "anchor_batch": problem.n,
    }
    trace = RunTrace(rows=rows, x_out=x_out, output_index=out_idx,
                     terminated=terminated, final_gradnorm=final_gradnorm,
                     ledgers=ledgers, metadata=metadata)
    return x_out, trace


def run_smooth(problem: FiniteSumProblem, cfg: SmoothSolverConfig) -> tuple:
    """Dispatch on cfg.algorithm; returns (x_out, RunTrace)."""
    return _run_smooth(problem, _resolve(problem, cfg))


def run_sarah(problem, cfg: SmoothSolverConfig) -> tuple:
    if cfg.algorithm != "sarah":
        raise ConfigError(f"run_sarah got algorithm {cfg.algorithm!r}")
    return run_smooth(problem, cfg)


def run_spider(problem, cfg: SmoothSolverConfig) -> tuple:
    if cfg.algorithm != "spider":
        raise ConfigError(f"run_spider got algorithm {cfg.algorithm!r}")
    return run_smooth(problem, cfg)


def run_spiderboost(problem, cfg: SmoothSolverConfig) -> tuple:
    if cfg.algorithm != "spiderboost":
        raise ConfigError(f"run_spiderboost got algorithm {cfg.algorithm!r}")
    return run_smooth(problem, cfg)
