"""Proximal mappings, the generalized gradient, and Bregman mirror steps.

prox_{eta h}(x) = argmin_u { h(u) + (1/2 eta) ||u - x||^2 }

G_eta(x) = (1/eta) (x - prox_{eta h}(x - eta grad f(x))) vanishes exactly at
critical points of f + h and collapses to grad f when h = 0.

The Bregman step solves argmin_{u in X} { h(u) + <v, u> + (1/eta) V(u, x) }
for a kernel-induced distance V. Supported kernels: Euclidean (where the step
IS prox of a gradient step) and negative entropy on the simplex (closed-form
multiplicative update, h = 0 only).
"""

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedCombinationError
from .ledger import SfoLedger
from .problems import full_gradient


# ---------------------------------------------------------------------------
# Regularizers h
# ---------------------------------------------------------------------------

class Regularizer:
    kind = "abstract"

    def value(self, x) -> float:
        raise NotImplementedError

    def prox(self, x, eta) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


class ZeroRegularizer(Regularizer):
    """h = 0; the proximal mapping is the identity."""

    kind = "zero"

    def value(self, x):
        return 0.0

    def prox(self, x, eta):
        return np.asarray(x, dtype=float)


class L1Regularizer(Regularizer):
    """h(x) = lam * ||x||_1; prox is the soft threshold by eta*lam."""

    kind = "l1"

    def __init__(self, lam: float):
        if lam < 0:
            raise ConfigError("l1 weight must be nonnegative")
        self.lam = float(lam)

    def value(self, x):
        return self.lam * float(np.abs(x).sum())

    def prox(self, x, eta):
        x = np.asarray(x, dtype=float)
        t = eta * self.lam
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)

    def describe(self):
        return {"kind": self.kind, "lam": self.lam}


class BoxIndicator(Regularizer):
    """Indicator of the box [lo, hi]^d; prox is the clamp."""

    kind = "box"

    def __init__(self, lo: float, hi: float):
        if not lo < hi:
            raise ConfigError(f"box needs lo < hi, got [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if bool(np.all((x >= self.lo) & (x <= self.hi))) else float("inf")

    def prox(self, x, eta):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def describe(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


class CustomRegularizer(Regularizer):
    kind = "custom"

    def __init__(self, value_fn, prox_fn):
        self._value = value_fn
        self._prox = prox_fn

    def value(self, x):
        return float(self._value(x))

    def prox(self, x, eta):
        return np.asarray(self._prox(x, eta), dtype=float)


def prox(reg: Regularizer, x, eta: float) -> np.ndarray:
    """Exact proximal mapping of eta*h at x."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("prox input must be finite")
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    return reg.prox(x, eta)


def generalized_gradient(problem, reg: Regularizer, x, eta: float,
                         ledger: SfoLedger = None) -> np.ndarray:
    """G_eta(x); bills n SFO (full gradient) plus one PO."""
    x = problem.check_point(x)
    g = full_gradient(problem, x, ledger)
    if ledger is not None:
        ledger.charge_prox()
    if isinstance(reg, ZeroRegularizer):
        # Identity prox collapses G_eta to the gradient; return it directly so
        # the identity holds exactly instead of up to rounding.
        return g
    p = prox(reg, x - eta * g, eta)
    return (x - p) / eta


# ---------------------------------------------------------------------------
# Bregman geometries
# ---------------------------------------------------------------------------

class BregmanGeometry:
    """Kernel omega, its strong-convexity modulus alpha (w.r.t. the kernel's
    natural norm), and the induced distance V(x,y)."""

    kind = "abstract"
    alpha = 1.0
    domain = "all-space"

    def omega(self, x) -> float:
        raise NotImplementedError

    def omega_gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(self.omega(x) - self.omega(y) - self.omega_gradient(y) @ (x - y))

    def describe(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha, "domain": self.domain}


class EuclideanGeometry(BregmanGeometry):
    """omega = 0.5 ||x||^2, V(x,y) = 0.5 ||x-y||^2, 1-strongly convex in l2."""

    kind = "euclidean"
    alpha = 1.0
    domain = "all-space"

    def omega(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ x)

    def omega_gradient(self, x):
        return np.asarray(x, dtype=float)


class EntropyGeometry(BregmanGeometry):
    """omega = sum x_i log x_i - x_i on the simplex; V is the KL divergence,
    1-strongly convex w.r.t. the l1 norm."""

    kind = "entropy"
    alpha = 1.0
    domain = "simplex"

    def omega(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("entropy kernel needs nonnegative coordinates")
        xp = x[x > 0]
        return float(np.sum(xp * np.log(xp) - xp))

    def omega_gradient(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("entropy kernel gradient needs strictly positive coordinates")
        return np.log(x)


def _check_simplex(x):
    if np.any(x < 0) or abs(float(x.sum()) - 1.0) > 1e-9:
        raise DomainError("point is not on the probability simplex")
    if np.any(x == 0):
        raise DomainError("entropy step undefined at a boundary point (some x_i = 0)")


def bregman_prox_step(geom: BregmanGeometry, reg: Regularizer, x, v, eta: float,
                      ledger: SfoLedger = None) -> np.ndarray:
    """argmin_{u in X} { h(u) + <v, u> + (1/eta) V(u, x) }; one PO unit.

    Euclidean kernel delegates to prox(reg, x - eta v, eta), bit for bit the
    proximal gradient step. Entropy kernel on the simplex (h = 0) is the
    multiplicative update x_i exp(-eta v_i) / sum_j x_j exp(-eta v_j).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ConfigError(f"direction shape {v.shape} != point shape {x.shape}")
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    if ledger is not None:
        ledger.charge_prox()
    if isinstance(geom, EuclideanGeometry):
        return prox(reg, x - eta * v, eta)
    if isinstance(geom, EntropyGeometry):
        if not isinstance(reg, ZeroRegularizer):
            raise UnsupportedCombinationError(
                "entropy kernel supports only the zero regularizer (closed-form update)")
        _check_simplex(x)
        logits = np.log(x) - eta * v
        logits -= logits.max()
        w = np.exp(logits)
        return w / w.sum()
    raise UnsupportedCombinationError(f"no update rule for kernel {geom.kind!r}")


def bregman_generalized_gradient(problem, geom: BregmanGeometry, reg: Regularizer, x,
                                 eta: float, ledger: SfoLedger = None) -> np.ndarray:
    """Kernel-aware G_eta: the scaled displacement of one exact step taken
    with the true gradient, G = (x - x+)/eta. Euclidean reduces to
    generalized_gradient. Reported in l2 regardless of the kernel's norm."""
    if isinstance(geom, EuclideanGeometry):
        return generalized_gradient(problem, reg, x, eta, ledger)
    x = problem.check_point(x)
    g = full_gradient(problem, x, ledger)
    x_plus = bregman_prox_step(geom, reg, x, g, eta, ledger)
    return (x - x_plus) / eta
