"""Finite-sum problems, streaming oracles, and dataset plumbing.

A finite-sum problem is f(x) = (1/n) sum_i f_i(x) with every component
gradient L-Lipschitz. Problems expose per-component oracles plus batched
means; batch summation is sequential in the supplied index order so traces
are bit-reproducible.
"""

import numpy as np

from .errors import ConfigError, DatasetParseError
from .ledger import SfoLedger


class Component:
    """One summand f_i: a (value, gradient) callable pair."""

    __slots__ = ("value", "gradient")

    def __init__(self, value, gradient):
        self.value = value
        self.gradient = gradient


class FiniteSumProblem:
    """Base finite-sum objective.

    Subclasses implement ``component_value`` / ``component_gradient`` and may
    override the batched paths with vectorized versions. ``lipschitz_L`` must
    bound the Lipschitz constant of every *component* gradient (the variance
    recursion and all theorem stepsizes are stated in terms of it).
    ``f_star`` is a lower bound on the optimal value, or None if unknown.
    """

    def __init__(self, n: int, d: int, lipschitz_L: float, f_star=None, name: str = "finite-sum"):
        if n < 1 or d < 1:
            raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        self.n = int(n)
        self.d = int(d)
        self.lipschitz_L = float(lipschitz_L)
        self.f_star = None if f_star is None else float(f_star)
        self.name = name

    def component_value(self, i: int, x: np.ndarray) -> float:
        raise NotImplementedError

    def component_gradient(self, i: int, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def batch_gradient(self, indices, x: np.ndarray) -> np.ndarray:
        """Mean of component gradients over ``indices``, summed in order."""
        acc = np.zeros(self.d)
        for i in indices:
            acc += self.component_gradient(int(i), x)
        return acc / len(indices)

    def batch_value(self, indices, x: np.ndarray) -> float:
        acc = 0.0
        for i in indices:
            acc += self.component_value(int(i), x)
        return acc / len(indices)

    def value(self, x: np.ndarray) -> float:
        return self.batch_value(np.arange(self.n), x)

    def component_gradient_matrix(self, x: np.ndarray) -> np.ndarray:
        """All n component gradients at one point, shape (n, d). Diagnostic
        helper for variance estimation; not an oracle-charged path."""
        return np.stack([self.component_gradient(i, x) for i in range(self.n)])

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ConfigError(f"point has shape {x.shape}, problem dimension is ({self.d},)")
        return x


class ComponentListProblem(FiniteSumProblem):
    """Finite sum built from an explicit list of Components."""

    def __init__(self, components, d, lipschitz_L, f_star=None, name="components"):
        super().__init__(len(components), d, lipschitz_L, f_star, name)
        self.components = list(components)

    def component_value(self, i, x):
        return float(self.components[i].value(x))

    def component_gradient(self, i, x):
        return np.asarray(self.components[i].gradient(x), dtype=float)


def full_gradient(problem: FiniteSumProblem, x, ledger: SfoLedger = None) -> np.ndarray:
    """(1/n) sum_i grad f_i(x). Charges n SFO units to an attached ledger."""
    x = problem.check_point(x)
    g = problem.batch_gradient(np.arange(problem.n), x)
    if ledger is not None:
        ledger.charge_full_gradient(problem.n)
    return g


def minibatch_gradient(problem: FiniteSumProblem, x, indices, ledger: SfoLedger = None) -> np.ndarray:
    """Mean gradient over a multiset of component ids, summed in the given
    index order. Charges len(indices) SFO units."""
    x = problem.check_point(x)
    indices = np.asarray(indices, dtype=int)
    if indices.size == 0:
        raise ConfigError("minibatch_gradient needs a nonempty index set")
    if indices.min() < 0 or indices.max() >= problem.n:
        raise ConfigError(f"component ids must lie in [0, {problem.n}), got range "
                          f"[{indices.min()}, {indices.max()}]")
    g = problem.batch_gradient(indices, x)
    if ledger is not None:
        ledger.charge_components(indices.size)
    return g


def problem_value(problem: FiniteSumProblem, x, ledger: SfoLedger = None) -> float:
    """Objective value; bills one value evaluation (diagnostic currency)."""
    x = problem.check_point(x)
    v = problem.value(x)
    if ledger is not None:
        ledger.charge_value()
    return float(v)


# ---------------------------------------------------------------------------
# Regularized logistic regression (the comparison-experiment objective)
# ---------------------------------------------------------------------------

def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class RegLogisticProblem(FiniteSumProblem):
    """Mean cross-entropy over labeled rows plus a smooth nonconvex penalty.

    f_i(w) = log(1 + exp(w.x_i)) - y_i * (w.x_i)
             + alpha_reg * sum_j w_j^2 / (1 + w_j^2)

    Labels are {0, 1}. The penalty sits inside every component so the mean
    objective is mean-CE + penalty. Its per-coordinate Hessian is bounded by
    2*alpha_reg, and |sigmoid'| <= 1/4, so every component gradient is
    Lipschitz with constant max_i ||x_i||^2 / 4 + 2*alpha_reg; that bound is
    what ``lipschitz_L`` carries. The looser mean-gradient constant
    ||X||_2^2/(4n) + 2*alpha_reg is exposed as ``mean_smoothness``.
    """

    def __init__(self, X, y, alpha_reg: float = 0.0, name: str = "reg-logistic"):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ConfigError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ConfigError("labels must be 0 or 1")
        if alpha_reg < 0:
            raise ConfigError("alpha_reg must be nonnegative")
        n, d = X.shape
        row_sq = np.einsum("ij,ij->i", X, X)
        L = float(row_sq.max()) / 4.0 + 2.0 * alpha_reg
        # Cross-entropy and the penalty are both nonnegative.
        super().__init__(n, d, L, f_star=0.0, name=name)
        self.X = X
        self.y = y
        self.alpha_reg = float(alpha_reg)
        sv = np.linalg.svd(X, compute_uv=False)
        self.mean_smoothness = float(sv[0] ** 2) / (4.0 * n) + 2.0 * alpha_reg

    def _penalty(self, w):
        wsq = w * w
        return self.alpha_reg * float(np.sum(wsq / (1.0 + wsq)))

    def _penalty_gradient(self, w):
        wsq1 = 1.0 + w * w
        return self.alpha_reg * 2.0 * w / (wsq1 * wsq1)

    def component_value(self, i, x):
        z = float(self.X[i] @ x)
        return float(np.logaddexp(0.0, z) - self.y[i] * z + self._penalty(x))

    def component_gradient(self, i, x):
        z = float(self.X[i] @ x)
        s = float(_sigmoid(np.array([z]))[0])
        return (s - self.y[i]) * self.X[i] + self._penalty_gradient(x)

    def batch_gradient(self, indices, x):
        Xb = self.X[np.asarray(indices, dtype=int)]
        z = Xb @ x
        resid = _sigmoid(z) - self.y[np.asarray(indices, dtype=int)]
        return resid @ Xb / len(indices) + self._penalty_gradient(x)

    def batch_value(self, indices, x):
        idx = np.asarray(indices, dtype=int)
        z = self.X[idx] @ x
        ce = np.logaddexp(0.0, z) - self.y[idx] * z
        return float(ce.mean() + self._penalty(x))

    def component_gradient_matrix(self, x):
        z = self.X @ x
        resid = _sigmoid(z) - self.y
        return resid[:, None] * self.X + self._penalty_gradient(x)[None, :]


def generate_synthetic_logistic(n: int, d: int, seed: int, alpha_reg: float = 0.0) -> RegLogisticProblem:
    """Seed-deterministic synthetic classification data.

    Features are standard normal; labels are Bernoulli draws from a planted
    logistic model whose weight vector is drawn (after the features, same
    stream) from the standard normal. Same seed, same bits.
    """
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    w_true = rng.standard_normal(d)
    p = _sigmoid(X @ w_true)
    y = (rng.random(n) < p).astype(float)
    return RegLogisticProblem(X, y, alpha_reg, name=f"synthetic-logistic(n={n},d={d},seed={seed})")


# ---------------------------------------------------------------------------
# libsvm ingestion
# ---------------------------------------------------------------------------

def load_libsvm(path, sparse: bool = False):
    """Parse libsvm text lines "label idx:val idx:val ..." (1-based, strictly
    increasing indices). Returns (X, y) with labels mapped to {0, 1}
    (+1/1 -> 1, -1/0 -> 0). Malformed input raises a parse error naming the
    1-based line number. ``sparse=True`` returns a scipy CSR matrix."""
    rows = []
    labels = []
    max_index = 0
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DatasetParseError(f"cannot read {path}: {exc}") from exc

    for line_no, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            raise DatasetParseError("empty line", line_no)
        raw_label = tokens[0]
        if raw_label in ("1", "+1"):
            label = 1.0
        elif raw_label in ("-1", "0"):
            label = 0.0
        else:
            raise DatasetParseError(f"unsupported label {raw_label!r} (expected +1/1/-1/0)", line_no)
        idxs = []
        vals = []
        prev = 0
        for tok in tokens[1:]:
            if ":" not in tok:
                raise DatasetParseError(f"feature token {tok!r} is not idx:val", line_no)
            idx_s, val_s = tok.split(":", 1)
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise DatasetParseError(f"non-numeric token {tok!r}", line_no) from None
            if idx < 1:
                raise DatasetParseError(f"index {idx} is not 1-based", line_no)
            if idx <= prev:
                raise DatasetParseError(f"index {idx} not strictly increasing", line_no)
            prev = idx
            idxs.append(idx)
            vals.append(val)
        rows.append((idxs, vals))
        labels.append(label)
        if idxs:
            max_index = max(max_index, idxs[-1])

    n = len(rows)
    if n == 0:
        raise DatasetParseError(f"{path} contains no rows")
    d = max(max_index, 1)
    y = np.asarray(labels)
    if sparse:
        from scipy import sparse as sp

        data, indices, indptr = [], [], [0]
        for idxs, vals in rows:
            indices.extend(i - 1 for i in idxs)
            data.extend(vals)
            indptr.append(len(data))
        return sp.csr_matrix((data, indices, indptr), shape=(n, d)), y
    X = np.zeros((n, d))
    for r, (idxs, vals) in enumerate(rows):
        for i, v in zip(idxs, vals):
            X[r, i - 1] = v
    return X, y


def load_libsvm_problem(path, alpha_reg: float = 0.0) -> RegLogisticProblem:
    X, y = load_libsvm(path, sparse=False)
    return RegLogisticProblem(X, y, alpha_reg, name=f"libsvm({path})")


# ---------------------------------------------------------------------------
# Streaming oracles (online setting)
# ---------------------------------------------------------------------------

class OnlineOracle:
    """Sampling access to an expectation objective f(x) = E_zeta[f_zeta(x)].

    ``draw_components(rng, count)`` returns iid component oracles.
    ``sigma_sq`` bounds the per-sample gradient variance at every point;
    ``lipschitz_L`` bounds every sample's gradient Lipschitz constant.
    Oracles with a known population expose population_gradient/population_value
    for diagnostics (never billed: they are not oracle queries the algorithm
    could make).
    """

    def __init__(self, d: int, sigma_sq: float, lipschitz_L: float, f_star=None, name="oracle"):
        self.d = int(d)
        self.sigma_sq = float(sigma_sq)
        self.lipschitz_L = float(lipschitz_L)
        self.f_star = None if f_star is None else float(f_star)
        self.name = name

    def draw_components(self, rng, count: int):
        raise NotImplementedError

    @property
    def has_population(self) -> bool:
        return False

    def population_gradient(self, x) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no closed-form population gradient")

    def population_value(self, x) -> float:
        raise NotImplementedError(f"{self.name} has no closed-form population value")


class FiniteSumOnlineOracle(OnlineOracle):
    """Views a finite-sum problem as a population: samples components iid with
    replacement. Population gradient/value are the full-problem ones. The
    default variance bound is sup_x (1/n) sum_i ||grad f_i(x) - grad f(x)||^2
    supplied by the caller, or a crude max-row bound for logistic pools."""

    def __init__(self, problem: FiniteSumProblem, sigma_sq=None):
        if sigma_sq is None:
            if isinstance(problem, RegLogisticProblem):
                # |sigmoid - y| <= 1 and the shared penalty cancels in the
                # deviation, so per-sample deviation norm is at most max ||x_i||.
                sigma_sq = float(np.max(np.einsum("ij,ij->i", problem.X, problem.X)))
            else:
                raise ConfigError("sigma_sq must be supplied for this problem type")
        super().__init__(problem.d, sigma_sq, problem.lipschitz_L, problem.f_star,
                         name=f"pool({problem.name})")
        self.problem = problem

    def draw_components(self, rng, count):
        idx = rng.integers(0, self.problem.n, size=int(count))
        prob = self.problem
        return [Component(value=lambda x, i=int(i): prob.component_value(i, x),
                          gradient=lambda x, i=int(i): prob.component_gradient(i, x))
                for i in idx]

    @property
    def has_population(self) -> bool:
        return True

    def population_gradient(self, x):
        return full_gradient(self.problem, x)

    def population_value(self, x):
        return self.problem.value(x)


class GaussianMeanOracle(OnlineOracle):
    """f_zeta(x) = 0.5 ||x - zeta||^2 with zeta ~ N(mu, (sigma^2/d) I).

    Population gradient x - mu, exact variance E||grad f_zeta - grad f||^2 =
    sigma^2 at every x, every sample 1-smooth. The cleanest fixture for anchor
    variance checks."""

    def __init__(self, mu, sigma: float):
        mu = np.asarray(mu, dtype=float).ravel()
        super().__init__(mu.size, sigma ** 2, 1.0, f_star=sigma ** 2 / 2.0,
                         name=f"gaussian-mean(d={mu.size})")
        self.mu = mu
        self.sigma = float(sigma)

    def draw_components(self, rng, count):
        scale = self.sigma / np.sqrt(self.d)
        zetas = self.mu + scale * rng.standard_normal((int(count), self.d))
        return [Component(value=lambda x, z=z: 0.5 * float(np.sum((x - z) ** 2)),
                          gradient=lambda x, z=z: x - z)
                for z in zetas]

    @property
    def has_population(self) -> bool:
        return True

    def population_gradient(self, x):
        return np.asarray(x, dtype=float) - self.mu

    def population_value(self, x):
        return 0.5 * float(np.sum((np.asarray(x) - self.mu) ** 2)) + self.sigma ** 2 / 2.0
