"""Central finite-difference gradient verification."""

import numpy as np


def central_difference_gradient(fn, x, step: float = 1e-6) -> np.ndarray:
    """Two-sided difference quotient of a scalar function, coordinate-wise."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        g[j] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return g


def relative_gradient_error(fn, grad_fn, x, step: float = 1e-6) -> float:
    """||analytic - numeric|| / max(1, ||analytic||)."""
    analytic = np.asarray(grad_fn(x), dtype=float)
    numeric = central_difference_gradient(fn, x, step)
    denom = max(1.0, float(np.linalg.norm(analytic)))
    return float(np.linalg.norm(analytic - numeric)) / denom


def check_problem_gradients(problem, rng, points: int = 20, step: float = 1e-6,
                            tol: float = 1e-5, scale: float = 1.0) -> float:
    """Worst relative error of full and per-component gradients at random
    points. Raises AssertionError above tol so test suites get a message
    naming the problem."""
    worst = 0.0
    for _ in range(points):
        x = scale * rng.standard_normal(problem.d)
        err = relative_gradient_error(problem.value, lambda z: problem.batch_gradient(
            np.arange(problem.n), z), x, step)
        worst = max(worst, err)
        i = int(rng.integers(problem.n))
        err_i = relative_gradient_error(lambda z, i=i: problem.component_value(i, z),
                                        lambda z, i=i: problem.component_gradient(i, z), x, step)
        worst = max(worst, err_i)
    if worst > tol:
        raise AssertionError(f"{problem.name}: finite-difference mismatch {worst:.3e} > {tol:.0e}")
    return worst
