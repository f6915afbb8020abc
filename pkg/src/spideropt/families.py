"""Synthetic problem families with known constants.

The log-valley family is built for oracle-complexity scaling measurements at
desk scale. Its mean objective phi is a scalar C^1 piecewise function of w:

  guard   w < 2:          parabola (curvature 1) walling off small w;
  valley  2 <= w <= 200:  phi(w) = 4 ln(200/w), so phi'(w) = -4/w;
  tail    w > 200:        parabola (curvature 1e-4) bottoming at w = 400
                          with phi(400) = -2.

Inside the valley, gradient descent obeys w_{k+1} = w_k + eta*4/w_k, hence
w_k^2 ~ w_0^2 + 8 eta k and |phi'(w_k)| ~ 4/sqrt(8 eta k): the iteration at
which the gradient norm first crosses eps grows like eps^-2 for any fixed
stepsize, which is what makes two-point complexity ratios stable enough to
band. All joins are slope-continuous and |phi''| <= 1 everywhere.
"""

import math

import numpy as np

from .errors import ConfigError
from .problems import FiniteSumProblem, OnlineOracle, Component

VALLEY_SLOPE = 4.0          # B: |phi'| = B/w inside the valley
VALLEY_GUARD = 2.0          # left edge of the valley
VALLEY_CROSS = 200.0        # right edge; |phi'| there is B/200 = 0.02
VALLEY_MIN_AT = 400.0       # argmin of the tail parabola
VALLEY_MIN = -2.0           # phi at the minimum

_TAIL_SLOPE = VALLEY_SLOPE / VALLEY_CROSS                       # 0.02
_TAIL_CURV = _TAIL_SLOPE / (VALLEY_MIN_AT - VALLEY_CROSS)       # 1e-4
_PHI_AT_CROSS = VALLEY_MIN + 0.5 * _TAIL_CURV * (VALLEY_CROSS - VALLEY_MIN_AT) ** 2
_PHI_AT_GUARD = VALLEY_SLOPE * math.log(VALLEY_CROSS / VALLEY_GUARD) + _PHI_AT_CROSS
_GUARD_SLOPE = -VALLEY_SLOPE / VALLEY_GUARD                     # -2
_GUARD_CURV = 1.0


def valley_value(w: float) -> float:
    w = float(w)
    if w < VALLEY_GUARD:
        t = w - VALLEY_GUARD
        return _PHI_AT_GUARD + _GUARD_SLOPE * t + 0.5 * _GUARD_CURV * t * t
    if w <= VALLEY_CROSS:
        return VALLEY_SLOPE * math.log(VALLEY_CROSS / w) + _PHI_AT_CROSS
    t = w - VALLEY_MIN_AT
    return VALLEY_MIN + 0.5 * _TAIL_CURV * t * t


def valley_slope(w: float) -> float:
    w = float(w)
    if w < VALLEY_GUARD:
        return _GUARD_SLOPE + _GUARD_CURV * (w - VALLEY_GUARD)
    if w <= VALLEY_CROSS:
        return -VALLEY_SLOPE / w
    return _TAIL_CURV * (w - VALLEY_MIN_AT)


def first_crossing_estimate(eps: float, eta: float, w0: float = 3.0) -> float:
    """Continuum estimate of the iteration where |phi'| first drops to eps."""
    if not (VALLEY_SLOPE / VALLEY_CROSS < eps <= VALLEY_SLOPE / w0):
        raise ConfigError(f"eps={eps} does not cross inside the valley from w0={w0}")
    return (VALLEY_SLOPE ** 2 / eps ** 2 - w0 ** 2) / (2.0 * VALLEY_SLOPE * eta)


class ValleyProblem(FiniteSumProblem):
    """Finite-sum view: f_i(w) = phi(w) + c_i * kappa * sin(w) with balanced
    signs c_i, so the mean is exactly phi and the component-gradient noise is
    kappa*cos(w), bounded by kappa. Smoothness 1 + kappa."""

    def __init__(self, n: int = 64, kappa: float = 0.05):
        if n % 2 != 0:
            raise ConfigError(f"need an even component count for balanced signs, got {n}")
        if not 0 <= kappa:
            raise ConfigError(f"kappa must be nonnegative, got {kappa}")
        super().__init__(n, 1, 1.0 + kappa, f_star=VALLEY_MIN,
                         name=f"log-valley(n={n})")
        self.kappa = float(kappa)
        signs = np.ones(n)
        signs[1::2] = -1.0
        self.signs = signs

    def component_value(self, i, x):
        w = float(x[0])
        return valley_value(w) + self.signs[i] * self.kappa * math.sin(w)

    def component_gradient(self, i, x):
        w = float(x[0])
        return np.array([valley_slope(w) + self.signs[i] * self.kappa * math.cos(w)])

    def batch_gradient(self, indices, x):
        w = float(x[0])
        c_mean = float(np.mean(self.signs[np.asarray(indices, dtype=int)]))
        return np.array([valley_slope(w) + c_mean * self.kappa * math.cos(w)])

    def batch_value(self, indices, x):
        w = float(x[0])
        c_mean = float(np.mean(self.signs[np.asarray(indices, dtype=int)]))
        return valley_value(w) + c_mean * self.kappa * math.sin(w)


class ValleyOracle(OnlineOracle):
    """Online view: f_zeta(w) = phi(w) + zeta*w with Rademacher zeta = +-sigma,
    so the sample gradient is phi'(w) + zeta, the variance is exactly sigma^2
    at every point, and the population objective is phi itself. The declared
    smoothness carries a factor-2 margin over phi's so stepsize defaults stay
    conservative under the sampled noise."""

    def __init__(self, sigma: float = 1.0):
        if sigma < 0:
            raise ConfigError(f"sigma must be nonnegative, got {sigma}")
        super().__init__(1, sigma ** 2, 2.0, f_star=VALLEY_MIN,
                         name=f"log-valley-oracle(sigma={sigma})")
        self.sigma = float(sigma)

    def draw_components(self, rng, count):
        zetas = self.sigma * (2.0 * rng.integers(0, 2, size=int(count)) - 1.0)
        return [Component(
            value=lambda x, z=float(z): valley_value(x[0]) + z * float(x[0]),
            gradient=lambda x, z=float(z): np.array([valley_slope(x[0]) + z]))
            for z in zetas]

    @property
    def has_population(self) -> bool:
        return True

    def population_gradient(self, x):
        return np.array([valley_slope(float(np.asarray(x).ravel()[0]))])

    def population_value(self, x):
        return valley_value(float(np.asarray(x).ravel()[0]))


class DiagQuadraticProblem(FiniteSumProblem):
    """Strongly convex quadratic finite sum with exactly known constants.

    f_i(x) = 0.5 x^T diag(a + c_i * spread) x with a = linspace(0.5, 0.75, d)
    and balanced signs c_i. The mean Hessian is diag(a): mu = 0.5 exactly,
    L = max(a) + spread = 1.0 exactly, minimizer 0 with value 0. Being
    mu-strongly convex, the objective satisfies the dominance inequality
    with tau = 1/(2 mu)."""

    def __init__(self, n: int = 32, d: int = 10, spread: float = 0.25):
        if n % 2 != 0:
            raise ConfigError(f"need an even component count for balanced signs, got {n}")
        a = np.linspace(0.5, 0.75, d)
        if not spread < a[0]:
            raise ConfigError(f"spread {spread} must stay below min curvature {a[0]}")
        super().__init__(n, d, float(a[-1] + spread), f_star=0.0,
                         name=f"diag-quadratic(n={n},d={d})")
        self.diag_mean = a
        self.spread = float(spread)
        signs = np.ones(n)
        signs[1::2] = -1.0
        self.signs = signs
        self.mu = float(a[0])
        self.tau_pl = 1.0 / (2.0 * self.mu)

    def _diag(self, i):
        return self.diag_mean + self.signs[i] * self.spread

    def component_value(self, i, x):
        return 0.5 * float(self._diag(i) @ (x * x))

    def component_gradient(self, i, x):
        return self._diag(i) * x

    def batch_gradient(self, indices, x):
        idx = np.asarray(indices, dtype=int)
        c_mean = float(np.mean(self.signs[idx]))
        return (self.diag_mean + c_mean * self.spread) * x

    def batch_value(self, indices, x):
        idx = np.asarray(indices, dtype=int)
        c_mean = float(np.mean(self.signs[idx]))
        return 0.5 * float((self.diag_mean + c_mean * self.spread) @ (x * x))


class LeastSquaresProblem(FiniteSumProblem):
    """f_i(x) = 0.5 (a_i^T x - b_i)^2 with rows scaled by 1/sqrt(d), so the
    exact per-component smoothness max_i ||a_i||^2 is near 1. f_star is set
    to the conservative lower bound 0 (used only for default budgets)."""

    def __init__(self, A, b, name="least-squares"):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != b.size:
            raise ConfigError(f"design shape {A.shape} does not match {b.size} targets")
        row_sq = np.einsum("ij,ij->i", A, A)
        super().__init__(A.shape[0], A.shape[1], float(row_sq.max()),
                         f_star=0.0, name=name)
        self.A = A
        self.b = b

    def component_value(self, i, x):
        r = float(self.A[i] @ x) - self.b[i]
        return 0.5 * r * r

    def component_gradient(self, i, x):
        r = float(self.A[i] @ x) - self.b[i]
        return r * self.A[i]

    def batch_gradient(self, indices, x):
        idx = np.asarray(indices, dtype=int)
        Ab = self.A[idx]
        resid = Ab @ x - self.b[idx]
        return resid @ Ab / idx.size

    def batch_value(self, indices, x):
        idx = np.asarray(indices, dtype=int)
        resid = self.A[idx] @ x - self.b[idx]
        return 0.5 * float(resid @ resid) / idx.size


def planted_least_squares(n: int = 400, d: int = 50, seed: int = 5,
                          nnz: int = 10, coeff_scale: float = 3.0,
                          noise: float = 0.05) -> LeastSquaresProblem:
    """Sparse-recovery least squares: rows iid N(0, 1/d), a planted x_true
    with nnz entries of magnitude coeff_scale, Gaussian label noise."""
    if not 0 < nnz <= d:
        raise ConfigError(f"nnz must lie in [1, {d}], got {nnz}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, d)) / math.sqrt(d)
    x_true = np.zeros(d)
    support = rng.choice(d, size=nnz, replace=False)
    x_true[support] = coeff_scale * np.where(rng.random(nnz) < 0.5, -1.0, 1.0)
    b = A @ x_true + noise * rng.standard_normal(n)
    problem = LeastSquaresProblem(A, b, name=f"planted-lasso(n={n},d={d},seed={seed})")
    problem.x_true = x_true
    return problem
