"""The recursive variance-reduced gradient estimator.

Within an epoch of length q the estimate evolves as

    v_k = v_{k-1} + (1/|S|) sum_{i in S} (grad f_i(x_k) - grad f_i(x_{k-1})),

anchored every q steps by a refresh (full gradient for finite sums, a size-s1
minibatch online). Conditioned on the past, with-replacement sampling keeps
v_k unbiased for grad f(x_k), and the estimator error obeys the variance
recursion

    E||v_k - grad f(x_k)||^2 <= (L^2/|S|) E||x_k - x_{k-1}||^2
                                 + E||v_{k-1} - grad f(x_{k-1})||^2,

which telescopes back to the anchor error eps1^2 (zero for full-gradient
anchors). ``variance_gap_estimate`` Monte-Carlo-checks that bound.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import ConfigError, EpochViolationError
from .ledger import SfoLedger
from .problems import FiniteSumProblem

SAMPLING_MODES = ("with-replacement", "without-replacement")


class SpiderEstimator:
    """Single-owner mutable estimator state; shares its caller's RNG stream."""

    def __init__(self, q: int, s2: int, rng, sampling_mode: str = "with-replacement",
                 ledger: Optional[SfoLedger] = None):
        if q < 1:
            raise ConfigError(f"epoch length q must be >= 1, got {q}")
        if s2 < 1:
            raise ConfigError(f"inner batch s2 must be >= 1, got {s2}")
        if sampling_mode not in SAMPLING_MODES:
            raise ConfigError(f"sampling_mode must be one of {SAMPLING_MODES}, got {sampling_mode!r}")
        self.q = int(q)
        self.s2 = int(s2)
        self.rng = rng
        self.sampling_mode = sampling_mode
        self.ledger = ledger
        self.v: Optional[np.ndarray] = None
        self.prev_x: Optional[np.ndarray] = None
        self.iter_in_epoch = 0

    def refresh(self, anchor_grad, x) -> None:
        """Reset the recursion at an anchor: v := anchor_grad exactly."""
        anchor_grad = np.asarray(anchor_grad, dtype=float)
        x = np.asarray(x, dtype=float)
        if anchor_grad.shape != x.shape:
            raise ConfigError(f"anchor gradient shape {anchor_grad.shape} != point shape {x.shape}")
        self.v = anchor_grad.copy()
        self.prev_x = x.copy()
        self.iter_in_epoch = 0

    def refresh_due(self) -> bool:
        return self.v is None or self.iter_in_epoch >= self.q - 1

    def draw_indices(self, n: int) -> np.ndarray:
        if self.sampling_mode == "with-replacement":
            return self.rng.integers(0, n, size=self.s2)
        if self.s2 > n:
            raise ConfigError(f"cannot draw {self.s2} of {n} indices without replacement")
        # Canonical ascending order so the full-batch case sums like full_gradient.
        return np.sort(self.rng.choice(n, size=self.s2, replace=False))

    def spider_step(self, problem: FiniteSumProblem, x_new) -> np.ndarray:
        """One inner update against a finite-sum problem. Draws s2 indices,
        charges 2*s2 SFO, advances prev_x."""
        x_new = problem.check_point(x_new)
        self._pre_step(x_new)
        idx = self.draw_indices(problem.n)
        mean_new = problem.batch_gradient(idx, x_new)
        mean_prev = problem.batch_gradient(idx, self.prev_x)
        if self.ledger is not None:
            self.ledger.charge_components(2 * self.s2)
        return self._apply(mean_new - mean_prev, x_new)

    def spider_step_components(self, components, x_new) -> np.ndarray:
        """Inner update from freshly drawn component oracles (online setting).
        Charges 2*len(components) SFO."""
        x_new = np.asarray(x_new, dtype=float)
        self._pre_step(x_new)
        if len(components) == 0:
            raise ConfigError("need at least one sampled component")
        acc = np.zeros_like(x_new)
        for c in components:
            acc += np.asarray(c.gradient(x_new), dtype=float)
            acc -= np.asarray(c.gradient(self.prev_x), dtype=float)
        if self.ledger is not None:
            self.ledger.charge_components(2 * len(components))
        return self._apply(acc / len(components), x_new)

    def _pre_step(self, x_new):
        if self.v is None:
            raise EpochViolationError("spider_step before any refresh")
        if self.iter_in_epoch >= self.q - 1:
            raise EpochViolationError(
                f"refresh due: {self.iter_in_epoch + 1} steps since last anchor with q={self.q}")
        if x_new.shape != self.prev_x.shape:
            raise ConfigError(f"point shape {x_new.shape} != estimator dimension {self.prev_x.shape}")

    def _apply(self, increment, x_new):
        self.v = self.v + increment
        self.prev_x = x_new.copy()
        self.iter_in_epoch += 1
        return self.v


@dataclass
class VarianceGapStep:
    k: int
    empirical: float
    bound: float
    stderr: float
    flagged: bool


@dataclass
class VarianceGapReport:
    steps: List[VarianceGapStep]
    trials: int
    s2: int

    @property
    def passed(self) -> bool:
        return not any(s.flagged for s in self.steps)


def variance_gap_estimate(problem: FiniteSumProblem, trajectory, s2: int, trials: int,
                          sampling_mode: str = "with-replacement", seed: int = 0,
                          eps1_sq: float = 0.0) -> VarianceGapReport:
    """Monte-Carlo E||v_k - grad f(x_k)||^2 along a fixed trajectory vs the
    telescoped variance-recursion bound

        eps1^2 + (L^2/s2) * sum_{i<k} ||x_{i+1} - x_i||^2.

    The trajectory starts at the anchor (exact refresh, so the k=0 deviation
    is eps1). A step is flagged when the empirical mean exceeds the bound by
    more than 3 standard errors. Trials are vectorized but draw iid batches
    exactly as per-trial estimators would."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if sampling_mode not in SAMPLING_MODES:
        raise ConfigError(f"sampling_mode must be one of {SAMPLING_MODES}")
    traj = [problem.check_point(x) for x in trajectory]
    if len(traj) < 2:
        raise ConfigError("trajectory needs at least 2 points (anchor plus one step)")
    if sampling_mode == "without-replacement" and s2 > problem.n:
        raise ConfigError(f"cannot draw {s2} of {problem.n} indices without replacement")

    rng = np.random.default_rng(seed)
    L = problem.lipschitz_L
    n = problem.n
    dev = np.zeros((trials, problem.d))  # v - grad f, exactly 0 at the anchor
    G_prev = problem.component_gradient_matrix(traj[0])
    mean_prev = G_prev.mean(axis=0)
    bound = eps1_sq
    steps = []
    for k in range(1, len(traj)):
        G_new = problem.component_gradient_matrix(traj[k])
        mean_new = G_new.mean(axis=0)
        if sampling_mode == "with-replacement":
            idx = rng.integers(0, n, size=(trials, s2))
        else:
            idx = np.argsort(rng.random((trials, n)), axis=1)[:, :s2]
        diff = G_new[idx] - G_prev[idx]          # (trials, s2, d)
        dev += diff.mean(axis=1) - (mean_new - mean_prev)
        sq = np.einsum("td,td->t", dev, dev)
        empirical = float(sq.mean())
        stderr = float(sq.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        bound += (L * L / s2) * float(np.sum((traj[k] - traj[k - 1]) ** 2))
        steps.append(VarianceGapStep(k=k, empirical=empirical, bound=bound, stderr=stderr,
                                     flagged=empirical > bound + 3.0 * stderr))
        G_prev, mean_prev = G_new, mean_new
    return VarianceGapReport(steps=steps, trials=trials, s2=s2)
