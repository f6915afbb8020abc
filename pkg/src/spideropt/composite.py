"""Composite-objective solvers: proximal/Bregman variants of the plain-step
variance-reduced method.

Three modes share the estimator and the per-iteration prox step
x_{k+1} = argmin_u { h(u) + <v_k, u> + (1/eta) V(u, x_k) }:

  finite-sum            full-gradient anchors every q steps, output x_xi with
                        xi uniform over all K iterations;
  online                size-s1 sampled anchors, never a full gradient;
  gradient-dominance    epoch restarts to a random earlier iterate plus a
                        linear-rate stopping rule on the generalized gradient
                        at epoch boundaries.

Feasibility margin: beta2 = alpha eta - L eta^2/2 - eta/2 - eta^3 L^2 q/(2 s2)
must be positive for the guarantee; at eta = 1/(2L), q = s2 it equals
(alpha - 7/8)/(2L), hence the alpha > 7/8 gate on Bregman kernels.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DomainError, SolverAbort,
                     UnsupportedCombinationError)
from .estimator import SpiderEstimator
from .ledger import LedgerPair
from .problems import (FiniteSumProblem, OnlineOracle, full_gradient,
                       problem_value)
from .proximal import (BregmanGeometry, EuclideanGeometry, Regularizer,
                       ZeroRegularizer, bregman_generalized_gradient,
                       bregman_prox_step)
from .smooth import RunTrace, TraceRow, theorem_iteration_budget

COMPOSITE_MODES = ("finite-sum", "online", "gradient-dominance")


def beta2(eta: float, lipschitz_L: float, q: int, s2: int, alpha: float) -> float:
    """Feasibility margin of the composite-step analysis; must be positive."""
    return (alpha * eta
            - lipschitz_L * eta ** 2 / 2.0
            - eta / 2.0
            - eta ** 3 * lipschitz_L ** 2 * q / (2.0 * s2))


def online_anchor_batch(sigma_sq: float, eps: float, alpha: float = 1.0) -> int:
    """Default anchor batch s1; equals ceil(24 sigma^2 / eps^2) at alpha=1."""
    if not eps > 0:
        raise ConfigError(f"target_eps must be positive, got {eps}")
    if sigma_sq < 0:
        raise ConfigError(f"sigma_sq must be nonnegative, got {sigma_sq}")
    coeff = 2.0 * ((1.0 / (alpha - 7.0 / 8.0)) * (1.0 + 1.0 / (4.0 * alpha ** 2))
                   + 2.0 / alpha ** 2)
    return math.ceil(coeff * sigma_sq / eps ** 2)


def online_iteration_budget(lipschitz_L: float, delta0: float, eps: float,
                            alpha: float = 1.0) -> int:
    """Default K for online runs; equals ceil(80 L delta0 / eps^2) at alpha=1."""
    if not eps > 0:
        raise ConfigError(f"target_eps must be positive, got {eps}")
    if delta0 < 0:
        raise ConfigError(f"initial gap is negative ({delta0}); check f_star")
    coeff = (8.0 / (alpha - 7.0 / 8.0)) * (1.0 + 1.0 / (4.0 * alpha))
    return max(1, math.ceil(coeff * lipschitz_L * delta0 / eps ** 2))


def gd_epoch_length(lipschitz_L: float, tau: float, c: float = 128.0) -> int:
    """Default restart-epoch length q = ceil(c L tau), floored at the minimum
    viable 3. c = 128 keeps the per-epoch contraction factor 64 tau L/(q-2)
    below one."""
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    return max(3, math.ceil(c * lipschitz_L * tau))


@dataclass
class CompositeSolverConfig:
    """Unset fields resolve to guarantee-backed defaults.

    finite-sum: q = s2 = ceil(sqrt(n)), eta = 1/(2L),
                K = ceil(40 L (Psi(x0) - f_star) / target_eps^2).
    online:     s1 = ceil(24 sigma^2/eps^2) (alpha=1 form), q = s2 = ceil(sqrt(s1)),
                eta = 1/(2L), K = ceil(80 L (Psi(x0) - f_star)/eps^2) (alpha=1 form).
    gradient-dominance: eta = 1/(8L), q = ceil(gd_epoch_constant * L * tau),
                s2 = 1; `epochs` (or K, read as epochs*q) must be given.
    """

    mode: str = None
    target_eps: float = None
    eta: float = None
    q: int = None
    s1: int = None
    s2: int = None
    K: int = None
    epochs: int = None
    tau: float = None
    gd_epoch_constant: float = 128.0
    sigma_sq: float = None
    geometry: BregmanGeometry = None
    reg: Regularizer = None
    seed: int = 0
    x0: np.ndarray = None
    sampling: str = None
    trace_stride: int = 1
    diagnostics: bool = False
    f_star: float = None


@dataclass
class _ResolvedComposite:
    mode: str
    eta: float
    q: int
    s1: int
    s2: int
    K: int
    epochs: int
    eps: float
    tau: float
    sigma_sq: float
    geometry: BregmanGeometry
    reg: Regularizer
    seed: int
    x0: np.ndarray
    sampling: str
    trace_stride: int
    diagnostics: bool
    theorem_defaults: bool


def _base_checks(cfg: CompositeSolverConfig, mode: str, d: int):
    if cfg.mode is not None and cfg.mode != mode:
        raise ConfigError(f"config mode {cfg.mode!r} does not match the "
                          f"requested {mode!r} run")
    geometry = cfg.geometry if cfg.geometry is not None else EuclideanGeometry()
    reg = cfg.reg if cfg.reg is not None else ZeroRegularizer()
    if geometry.alpha <= 7.0 / 8.0:
        raise ConfigError(
            f"kernel strong-convexity modulus alpha = {geometry.alpha} is too "
            "small: the composite analysis needs alpha > 7/8")
    if cfg.trace_stride < 1:
        raise ConfigError(f"trace_stride must be >= 1, got {cfg.trace_stride}")
    x0 = np.asarray(cfg.x0, dtype=float).copy() if cfg.x0 is not None \
        else np.zeros(d)
    if x0.shape != (d,):
        raise ConfigError(f"x0 has shape {x0.shape}, dimension is ({d},)")
    eps = cfg.target_eps
    if eps is not None and not eps > 0:
        raise ConfigError(f"target_eps must be positive, got {eps}")
    return geometry, reg, x0, eps


def _objective_gap(value0: float, reg_value0: float, f_star) -> float:
    if f_star is None:
        raise ConfigError("cannot derive the default iteration budget: no "
                          "known f_star; set K explicitly")
    return value0 + reg_value0 - f_star


def _resolve_finite_sum(problem: FiniteSumProblem,
                        cfg: CompositeSolverConfig) -> _ResolvedComposite:
    geometry, reg, x0, eps = _base_checks(cfg, "finite-sum", problem.d)
    L = problem.lipschitz_L
    n = problem.n
    q = int(cfg.q) if cfg.q is not None else max(1, math.ceil(math.sqrt(n)))
    s2 = int(cfg.s2) if cfg.s2 is not None else max(1, math.ceil(math.sqrt(n)))
    eta = float(cfg.eta) if cfg.eta is not None else 1.0 / (2.0 * L)
    if q < 1 or s2 < 1:
        raise ConfigError(f"q and s2 must be positive integers, got q={q}, s2={s2}")
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    if cfg.K is not None:
        K = int(cfg.K)
    else:
        if eps is None:
            raise ConfigError("set K or target_eps (used for the default budget)")
        f_star = cfg.f_star if cfg.f_star is not None else problem.f_star
        delta0 = _objective_gap(problem.value(x0), reg.value(x0), f_star)
        K = theorem_iteration_budget(L, delta0, eps)
    if K < 1:
        raise ConfigError(f"K must be a positive integer, got {K}")
    theorem_defaults = cfg.eta is None and cfg.q is None and cfg.s2 is None
    if theorem_defaults:
        margin = beta2(eta, L, q, s2, geometry.alpha)
        if not margin > 0:
            raise ConfigError(f"default-parameter feasibility check failed: "
                              f"beta2 = {margin} <= 0")
    sampling = cfg.sampling if cfg.sampling is not None else "with-replacement"
    return _ResolvedComposite("finite-sum", eta, q, None, s2, K, None, eps, None,
                              0.0, geometry, reg, int(cfg.seed), x0, sampling,
                              int(cfg.trace_stride), cfg.diagnostics,
                              theorem_defaults)


def _resolve_online(oracle: OnlineOracle,
                    cfg: CompositeSolverConfig) -> _ResolvedComposite:
    geometry, reg, x0, eps = _base_checks(cfg, "online", oracle.d)
    L = oracle.lipschitz_L
    alpha = geometry.alpha
    sigma_sq = float(cfg.sigma_sq) if cfg.sigma_sq is not None else oracle.sigma_sq
    if sigma_sq < 0:
        raise ConfigError(f"sigma_sq must be nonnegative, got {sigma_sq}")
    if cfg.s1 is not None:
        s1 = int(cfg.s1)
        if s1 < 1:
            raise ConfigError(f"anchor batch s1 must be >= 1, got {s1}")
    else:
        if eps is None:
            raise ConfigError("set s1 or target_eps (used for the default "
                              "anchor batch)")
        s1 = max(1, online_anchor_batch(sigma_sq, eps, alpha))
    q = int(cfg.q) if cfg.q is not None else max(1, math.ceil(math.sqrt(s1)))
    s2 = int(cfg.s2) if cfg.s2 is not None else max(1, math.ceil(math.sqrt(s1)))
    eta = float(cfg.eta) if cfg.eta is not None else 1.0 / (2.0 * L)
    if q < 1 or s2 < 1:
        raise ConfigError(f"q and s2 must be positive integers, got q={q}, s2={s2}")
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    if cfg.K is not None:
        K = int(cfg.K)
    else:
        if eps is None:
            raise ConfigError("set K or target_eps (used for the default budget)")
        f_star = cfg.f_star if cfg.f_star is not None else oracle.f_star
        if f_star is None or not oracle.has_population:
            raise ConfigError("cannot derive the default iteration budget: the "
                              "oracle lacks a known optimum; set K explicitly")
        delta0 = _objective_gap(oracle.population_value(x0), reg.value(x0), f_star)
        K = online_iteration_budget(L, delta0, eps, alpha)
    if K < 1:
        raise ConfigError(f"K must be a positive integer, got {K}")
    theorem_defaults = cfg.eta is None and cfg.q is None and cfg.s2 is None
    if theorem_defaults:
        margin = beta2(eta, L, q, s2, alpha)
        if not margin > 0:
            raise ConfigError(f"default-parameter feasibility check failed: "
                              f"beta2 = {margin} <= 0")
    return _ResolvedComposite("online", eta, q, s1, s2, K, None, eps, None,
                              sigma_sq, geometry, reg, int(cfg.seed), x0,
                              "with-replacement", int(cfg.trace_stride),
                              cfg.diagnostics, theorem_defaults)


def _resolve_gd(problem: FiniteSumProblem,
                cfg: CompositeSolverConfig) -> _ResolvedComposite:
    geometry, reg, x0, eps = _base_checks(cfg, "gradient-dominance", problem.d)
    if not isinstance(geometry, EuclideanGeometry):
        raise UnsupportedCombinationError(
            "the restart scheme is analyzed for the Euclidean geometry only")
    if cfg.tau is None or not cfg.tau > 0:
        raise ConfigError("gradient-dominance mode needs a positive tau")
    tau = float(cfg.tau)
    L = problem.lipschitz_L
    eta = float(cfg.eta) if cfg.eta is not None else 1.0 / (8.0 * L)
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    q = int(cfg.q) if cfg.q is not None else \
        gd_epoch_length(L, tau, cfg.gd_epoch_constant)
    if q <= 2:
        raise ConfigError(f"restart window is empty for q = {q}; need q >= 3")
    s2 = int(cfg.s2) if cfg.s2 is not None else 1
    if s2 < 1:
        raise ConfigError(f"s2 must be a positive integer, got {s2}")
    if cfg.epochs is not None:
        epochs = int(cfg.epochs)
    elif cfg.K is not None:
        epochs = max(1, math.ceil(int(cfg.K) / q))
    else:
        raise ConfigError("gradient-dominance mode needs an epoch budget: "
                          "set epochs (or K)")
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")
    sampling = cfg.sampling if cfg.sampling is not None else "with-replacement"
    theorem_defaults = cfg.eta is None and cfg.q is None and cfg.s2 is None
    return _ResolvedComposite("gradient-dominance", eta, q, None, s2,
                              epochs * q, epochs, eps, tau, 0.0, geometry, reg,
                              int(cfg.seed), x0, sampling,
                              int(cfg.trace_stride), cfg.diagnostics,
                              theorem_defaults)


def _prox_move(r: _ResolvedComposite, x, v, ledger, k: int):
    """One prox/Bregman step with non-finite and domain failures surfaced as
    SolverAbort carrying the iteration index."""
    try:
        x_new = bregman_prox_step(r.geometry, r.reg, x, v, r.eta, ledger)
    except DomainError as exc:
        raise SolverAbort(f"proximal step failed: {exc}", k=k) from exc
    if not np.all(np.isfinite(x_new)):
        raise SolverAbort("iterate became non-finite (overflow)", k=k)
    return x_new


def _fs_diag(problem, r: _ResolvedComposite, x, diag):
    """(gradnorm, loss, gnorm_eta) against the true finite-sum objective."""
    g = full_gradient(problem, x, diag)
    loss = problem_value(problem, x, diag) + float(r.reg.value(x))
    G = bregman_generalized_gradient(problem, r.geometry, r.reg, x, r.eta, diag)
    return float(np.linalg.norm(g)), loss, float(np.linalg.norm(G))


def _online_diag(oracle, r: _ResolvedComposite, x, diag):
    """Population-based diagnostics; unbilled (not oracle queries). Returns
    (None, None, None) when the oracle has no known population."""
    if not oracle.has_population:
        return None, None, None
    g = oracle.population_gradient(x)
    loss = float(oracle.population_value(x)) + float(r.reg.value(x))
    if isinstance(r.reg, ZeroRegularizer) and isinstance(r.geometry, EuclideanGeometry):
        G = g
    else:
        x_plus = bregman_prox_step(r.geometry, r.reg, x, g, r.eta, diag)
        G = (x - x_plus) / r.eta
    return float(np.linalg.norm(g)), loss, float(np.linalg.norm(G))


def _metadata(r: _ResolvedComposite, source_name, n, d, L, iterations_run,
              anchors_run, anchor_batch, epochs_run=None) -> dict:
    md = {
        "algorithm": {"finite-sum": "prox-spiderboost",
                      "online": "prox-spiderboost-o",
                      "gradient-dominance": "prox-spiderboost-gd"}[r.mode],
        "mode": r.mode, "problem": source_name, "n": n, "d": d,
        "lipschitz_L": L, "eta": r.eta, "q": r.q, "s1": r.s1, "s2": r.s2,
        "K": r.K, "epochs": r.epochs, "target_eps": r.eps, "tau": r.tau,
        "sigma_sq": r.sigma_sq, "seed": r.seed, "sampling": r.sampling,
        "geometry": r.geometry.describe(), "reg": r.reg.describe(),
        "theorem_defaults": r.theorem_defaults,
        "beta2": beta2(r.eta, L, r.q, r.s2, r.geometry.alpha),
        "eps1_sq": (r.sigma_sq / r.s1) if r.s1 else 0.0,
        "iterations_run": iterations_run, "anchors_run": anchors_run,
        "anchor_batch": anchor_batch, "epochs_run": epochs_run,
    }
    if r.mode == "gradient-dominance":
        md["eta_note"] = ("default stepsize is the analyzed 1/(8L); some "
                          "statements of the restart method ask for the "
                          "stricter eta < 1/(16L)")
    return md


def run_prox_spiderboost(problem: FiniteSumProblem,
                         cfg: CompositeSolverConfig) -> tuple:
    """Finite-sum composite minimization; output x_xi, xi uniform on
    {0,...,K-1} from the run's own stream."""
    r = _resolve_finite_sum(problem, cfg)
    rng = np.random.default_rng(r.seed)
    ledgers = LedgerPair()
    est = SpiderEstimator(q=r.q, s2=r.s2, rng=rng, sampling_mode=r.sampling,
                          ledger=ledgers.algorithm)
    x = r.x0
    xs = [x]
    rows = []
    t0 = time.perf_counter()
    for k in range(r.K):
        if k % r.q == 0:
            anchor = full_gradient(problem, x, ledgers.algorithm)
            est.refresh(anchor, x)
            v = est.v
        else:
            v = est.spider_step(problem, x)
        if not np.all(np.isfinite(v)):
            raise SolverAbort("gradient estimate became non-finite", k=k)
        if k % r.trace_stride == 0 or k == r.K - 1:
            gradnorm = loss = gnorm_eta = None
            if r.diagnostics:
                gradnorm, loss, gnorm_eta = _fs_diag(problem, r, x,
                                                     ledgers.diagnostic)
            rows.append(TraceRow(
                k=k, sfo=ledgers.algorithm.component_gradient_evals,
                po=ledgers.algorithm.prox_calls, vnorm=float(np.linalg.norm(v)),
                gradnorm=gradnorm, loss=loss, gnorm_eta=gnorm_eta,
                wall_ms=(time.perf_counter() - t0) * 1e3))
        x = _prox_move(r, x, v, ledgers.algorithm, k)
        xs.append(x)

    out_idx = int(rng.integers(0, r.K))
    x_out = xs[out_idx]
    g_out, _, gn_out = _fs_diag(problem, r, x_out, ledgers.diagnostic)
    trace = RunTrace(rows=rows, x_out=x_out, output_index=out_idx,
                     terminated=True, final_gradnorm=g_out, ledgers=ledgers,
                     metadata=_metadata(r, problem.name, problem.n, problem.d,
                                        problem.lipschitz_L, r.K,
                                        math.ceil(r.K / r.q), problem.n),
                     final_gnorm_eta=gn_out)
    return x_out, trace


def run_prox_spiderboost_o(oracle: OnlineOracle,
                           cfg: CompositeSolverConfig) -> tuple:
    """Online composite minimization: sampled anchors of size s1 every q
    steps, never a full gradient (the algorithm ledger's full-gradient count
    stays zero)."""
    r = _resolve_online(oracle, cfg)
    rng = np.random.default_rng(r.seed)
    ledgers = LedgerPair()
    est = SpiderEstimator(q=r.q, s2=r.s2, rng=rng, sampling_mode=r.sampling,
                          ledger=ledgers.algorithm)
    x = r.x0
    xs = [x]
    rows = []
    t0 = time.perf_counter()
    for k in range(r.K):
        if k % r.q == 0:
            comps = oracle.draw_components(rng, r.s1)
            acc = np.zeros(oracle.d)
            for c in comps:
                acc += np.asarray(c.gradient(x), dtype=float)
            ledgers.algorithm.charge_components(r.s1)
            est.refresh(acc / r.s1, x)
            v = est.v
        else:
            comps = oracle.draw_components(rng, r.s2)
            v = est.spider_step_components(comps, x)
        if not np.all(np.isfinite(v)):
            raise SolverAbort("gradient estimate became non-finite", k=k)
        if k % r.trace_stride == 0 or k == r.K - 1:
            gradnorm = loss = gnorm_eta = None
            if r.diagnostics:
                gradnorm, loss, gnorm_eta = _online_diag(oracle, r, x,
                                                         ledgers.diagnostic)
            rows.append(TraceRow(
                k=k, sfo=ledgers.algorithm.component_gradient_evals,
                po=ledgers.algorithm.prox_calls, vnorm=float(np.linalg.norm(v)),
                gradnorm=gradnorm, loss=loss, gnorm_eta=gnorm_eta,
                wall_ms=(time.perf_counter() - t0) * 1e3))
        x = _prox_move(r, x, v, ledgers.algorithm, k)
        xs.append(x)

    out_idx = int(rng.integers(0, r.K))
    x_out = xs[out_idx]
    g_out, _, gn_out = _online_diag(oracle, r, x_out, ledgers.diagnostic)
    trace = RunTrace(rows=rows, x_out=x_out, output_index=out_idx,
                     terminated=True, final_gradnorm=g_out, ledgers=ledgers,
                     metadata=_metadata(r, oracle.name, None, oracle.d,
                                        oracle.lipschitz_L, r.K,
                                        math.ceil(r.K / r.q), r.s1),
                     final_gnorm_eta=gn_out)
    return x_out, trace


def run_prox_spiderboost_gd(problem: FiniteSumProblem,
                            cfg: CompositeSolverConfig) -> tuple:
    """Restart scheme for gradient-dominated composites.

    Epochs of q iterations with single-sample (default) inner updates; at each
    epoch boundary the iterate is reset to a uniformly chosen iterate among
    the previous epoch's first q-2, then the anchor is refreshed and the
    boundary generalized gradient is checked against target_eps. Output is the
    final boundary iterate. The boundary check reuses the anchor gradient
    (no extra SFO); its prox call is billed to the diagnostic ledger.
    """
    r = _resolve_gd(problem, cfg)
    rng = np.random.default_rng(r.seed)
    ledgers = LedgerPair()
    est = SpiderEstimator(q=r.q, s2=r.s2, rng=rng, sampling_mode=r.sampling,
                          ledger=ledgers.algorithm)
    x = r.x0
    xs = [x]
    rows = []
    t0 = time.perf_counter()
    reached = False
    k = 0
    anchors_run = 0
    for t in range(r.epochs + 1):
        if t > 0:
            j = int(rng.integers(k - r.q + 1, k - 1))
            x = xs[j]
            xs[k] = x
        anchor = full_gradient(problem, x, ledgers.algorithm)
        anchors_run += 1
        est.refresh(anchor, x)
        if isinstance(r.reg, ZeroRegularizer):
            bound_G = anchor
        else:
            x_plus = bregman_prox_step(r.geometry, r.reg, x, anchor, r.eta,
                                       ledgers.diagnostic)
            bound_G = (x - x_plus) / r.eta
        bound_gnorm = float(np.linalg.norm(bound_G))
        loss = problem_value(problem, x, ledgers.diagnostic) \
            + float(r.reg.value(x)) if r.diagnostics else None
        rows.append(TraceRow(
            k=k, sfo=ledgers.algorithm.component_gradient_evals,
            po=ledgers.algorithm.prox_calls,
            vnorm=float(np.linalg.norm(anchor)),
            gradnorm=float(np.linalg.norm(anchor)), loss=loss,
            gnorm_eta=bound_gnorm, wall_ms=(time.perf_counter() - t0) * 1e3))
        if r.eps is not None and bound_gnorm <= r.eps:
            reached = True
            break
        if t == r.epochs:
            break
        for i in range(r.q):
            v = est.v if i == 0 else est.spider_step(problem, x)
            if not np.all(np.isfinite(v)):
                raise SolverAbort("gradient estimate became non-finite", k=k)
            if i > 0 and k % r.trace_stride == 0:
                gradnorm = loss = gnorm_eta = None
                if r.diagnostics:
                    gradnorm, loss, gnorm_eta = _fs_diag(problem, r, x,
                                                         ledgers.diagnostic)
                rows.append(TraceRow(
                    k=k, sfo=ledgers.algorithm.component_gradient_evals,
                    po=ledgers.algorithm.prox_calls,
                    vnorm=float(np.linalg.norm(v)), gradnorm=gradnorm,
                    loss=loss, gnorm_eta=gnorm_eta,
                    wall_ms=(time.perf_counter() - t0) * 1e3))
            x = _prox_move(r, x, v, ledgers.algorithm, k)
            xs.append(x)
            k += 1

    x_out = x
    terminated = reached or r.eps is None
    g_out, _, gn_out = _fs_diag(problem, r, x_out, ledgers.diagnostic)
    trace = RunTrace(rows=rows, x_out=x_out, output_index=k,
                     terminated=terminated, final_gradnorm=g_out,
                     ledgers=ledgers,
                     metadata=_metadata(r, problem.name, problem.n, problem.d,
                                        problem.lipschitz_L, k, anchors_run,
                                        problem.n, epochs_run=k // r.q),
                     final_gnorm_eta=gn_out)
    return x_out, trace


def run_composite(source, cfg: CompositeSolverConfig) -> tuple:
    """Dispatch on cfg.mode."""
    if cfg.mode == "finite-sum":
        return run_prox_spiderboost(source, cfg)
    if cfg.mode == "online":
        return run_prox_spiderboost_o(source, cfg)
    if cfg.mode == "gradient-dominance":
        return run_prox_spiderboost_gd(source, cfg)
    raise ConfigError(f"mode must be one of {COMPOSITE_MODES}, got {cfg.mode!r}")


# ---------------------------------------------------------------------------
# Gradient-dominance probe
# ---------------------------------------------------------------------------

@dataclass
class DominanceProbe:
    objective_gap: float
    g_sq: float
    margin: float
    violated: bool


@dataclass
class DominanceReport:
    tau: float
    psi_star: float
    probes: list
    violations: int
    max_violation: float
    min_feasible_tau: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_gradient_dominance(problem: FiniteSumProblem, reg: Regularizer,
                             tau: float, eta: float, probe_points,
                             psi_star: float = None,
                             reference_cfg: CompositeSolverConfig = None,
                             slack: float = 1e-9) -> DominanceReport:
    """Tests Psi(x) - Psi(x*) <= tau * ||G_eta(x)||^2 at every probe point.

    Psi(x*) must be supplied, or a reference config given for a high-budget
    solve whose output certifies it. A probe violates when its margin exceeds
    slack * max(1, |Psi(x)|). min_feasible_tau is the smallest tau consistent
    with all probes (inf if some probe has positive gap but zero G).
    """
    if tau < 0:
        raise ConfigError(f"tau must be nonnegative, got {tau}")
    if psi_star is None:
        if reference_cfg is None:
            raise ConfigError("minimizer value unknown: pass psi_star or a "
                              "reference_cfg for a certifying solve")
        x_ref, _ = run_prox_spiderboost(problem, reference_cfg)
        psi_star = problem.value(x_ref) + float(reg.value(x_ref))
    geom = EuclideanGeometry()
    probes = []
    violations = 0
    max_violation = 0.0
    min_feasible = 0.0
    for x in probe_points:
        x = problem.check_point(x)
        psi = problem.value(x) + float(reg.value(x))
        gap = psi - psi_star
        G = bregman_generalized_gradient(problem, geom, reg, x, eta)
        g_sq = float(G @ G)
        margin = gap - tau * g_sq
        tol = slack * max(1.0, abs(psi))
        violated = margin > tol
        if violated:
            violations += 1
            max_violation = max(max_violation, margin)
        if gap > tol:
            min_feasible = math.inf if g_sq <= 0 else max(min_feasible, gap / g_sq)
        probes.append(DominanceProbe(gap, g_sq, margin, violated))
    return DominanceReport(tau=float(tau), psi_star=float(psi_star),
                           probes=probes, violations=violations,
                           max_violation=max_violation,
                           min_feasible_tau=min_feasible)
