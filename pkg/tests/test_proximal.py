"""Proximal maps, generalized gradients, and Bregman mirror steps."""

import numpy as np
import pytest

from helpers import golden_section, prox_by_search
from spideropt import (
    BoxIndicator,
    ConfigError,
    CustomRegularizer,
    DomainError,
    EntropyGeometry,
    EuclideanGeometry,
    L1Regularizer,
    SfoLedger,
    UnsupportedCombinationError,
    ZeroRegularizer,
    ComponentListProblem,
    bregman_generalized_gradient,
    bregman_prox_step,
    full_gradient,
    generalized_gradient,
    generate_synthetic_logistic,
    prox,
)
from spideropt.problems import Component


def shifted_quadratic(a):
    """f(x) = 0.5 ||x - a||^2 as a one-component finite sum."""
    a = np.asarray(a, dtype=float)
    comp = Component(lambda x: 0.5 * float(np.sum((x - a) ** 2)),
                     lambda x: np.asarray(x - a, dtype=float))
    return ComponentListProblem([comp], d=a.size, lipschitz_L=1.0)


def test_l1_soft_threshold_example():
    got = prox(L1Regularizer(lam=1.0), np.array([2.0, -0.5, 0.0]), eta=1.0)
    assert np.array_equal(got, np.array([1.0, 0.0, 0.0]))


def test_box_projection_example():
    got = prox(BoxIndicator(lo=0.0, hi=1.0), np.array([-3.0, 0.4, 7.0]), eta=1.0)
    assert np.array_equal(got, np.array([0.0, 0.4, 1.0]))


def test_zero_regularizer_prox_is_identity():
    x = np.array([3.0, -2.5, 0.0, 1e-9])
    assert np.array_equal(prox(ZeroRegularizer(), x, eta=0.7), x)


def test_prox_agrees_with_golden_section_search():
    rng = np.random.default_rng(42)
    regs = [L1Regularizer(lam=0.8), BoxIndicator(lo=-0.5, hi=2.0)]
    for reg in regs:
        for _ in range(25):
            x = rng.normal(size=4) * 3.0
            eta = float(rng.uniform(0.05, 2.0))
            assert np.allclose(prox(reg, x, eta), prox_by_search(reg, x, eta),
                               rtol=0, atol=1e-8)


def test_prox_is_firmly_nonexpansive():
    rng = np.random.default_rng(7)
    for reg in (L1Regularizer(lam=1.3), BoxIndicator(lo=-1.0, hi=1.0)):
        for _ in range(50):
            x = rng.normal(size=6) * 2.0
            y = rng.normal(size=6) * 2.0
            px, py = prox(reg, x, 0.9), prox(reg, y, 0.9)
            lhs = float(np.sum((px - py) ** 2))
            rhs = float(np.dot(px - py, x - y))
            assert lhs <= rhs + 1e-12


def test_prox_input_validation():
    reg = L1Regularizer(lam=1.0)
    with pytest.raises(ConfigError):
        prox(reg, np.zeros(2), eta=0.0)
    with pytest.raises(ConfigError):
        prox(reg, np.zeros(2), eta=-1.0)
    with pytest.raises(DomainError):
        prox(reg, np.array([np.nan, 0.0]), eta=1.0)


def test_custom_regularizer_roundtrip():
    # square penalty: prox is a shrink by 1/(1 + eta)
    reg = CustomRegularizer(lambda x: 0.5 * float(np.sum(x ** 2)),
                            lambda x, eta: x / (1.0 + eta))
    got = prox(reg, np.array([2.0, -4.0]), eta=1.0)
    assert np.allclose(got, np.array([1.0, -2.0]))


def test_generalized_gradient_reduces_to_gradient_without_regularizer():
    prob = generate_synthetic_logistic(n=40, d=4, seed=10, alpha_reg=0.1)
    x = np.array([0.3, -0.2, 0.5, 0.1])
    g = generalized_gradient(prob, ZeroRegularizer(), x, eta=0.4)
    assert np.array_equal(g, full_gradient(prob, x))


def test_generalized_gradient_scalar_example():
    # f = x^2/2, l1(1), eta = 1, x = 0.5: forward point 0 is a prox fixed
    # point, so G = (0.5 - 0)/1 = 0.5
    prob = shifted_quadratic(np.zeros(1))
    g = generalized_gradient(prob, L1Regularizer(lam=1.0), np.array([0.5]), eta=1.0)
    assert g[0] == pytest.approx(0.5, abs=1e-15)


def test_generalized_gradient_vanishes_at_composite_stationary_point():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a = rng.normal(size=5) * 2.0
        lam = float(rng.uniform(0.2, 1.5))
        prob = shifted_quadratic(a)
        reg = L1Regularizer(lam=lam)
        x_star = np.sign(a) * np.maximum(np.abs(a) - lam, 0.0)
        for eta in (1.0, 0.31, 0.05):
            g = generalized_gradient(prob, reg, x_star, eta)
            assert np.linalg.norm(g) <= 1e-10


def test_generalized_gradient_billing():
    prob = generate_synthetic_logistic(n=30, d=3, seed=2, alpha_reg=0.1)
    led = SfoLedger()
    generalized_gradient(prob, L1Regularizer(lam=0.1), np.zeros(3), eta=0.5,
                         ledger=led)
    assert led.component_gradient_evals == 30
    assert led.prox_calls == 1


def test_kernel_distance_identities():
    rng = np.random.default_rng(5)
    euclid = EuclideanGeometry()
    for _ in range(20):
        x = rng.normal(size=4)
        y = rng.normal(size=4)
        assert euclid.distance(x, x) == 0.0
        assert euclid.distance(x, y) == pytest.approx(
            0.5 * float(np.sum((x - y) ** 2)), rel=1e-12)
        assert euclid.distance(x, y) >= 0.5 * euclid.alpha * float(
            np.sum((x - y) ** 2)) - 1e-12

    entropy = EntropyGeometry()
    for _ in range(20):
        p = rng.dirichlet(np.ones(4))
        q = rng.dirichlet(np.ones(4))
        p = np.maximum(p, 1e-12); p /= p.sum()
        q = np.maximum(q, 1e-12); q /= q.sum()
        assert abs(entropy.distance(p, p)) <= 1e-15
        # 1-strong convexity w.r.t. the l1 norm dominates the l2 form
        assert entropy.distance(p, q) >= 0.5 * entropy.alpha * float(
            np.sum((p - q) ** 2)) - 1e-12


def test_euclidean_bregman_step_matches_prox_of_forward_step():
    rng = np.random.default_rng(8)
    geom = EuclideanGeometry()
    for reg in (ZeroRegularizer(), L1Regularizer(lam=0.7),
                BoxIndicator(lo=-1.0, hi=1.0)):
        for _ in range(20):
            x = rng.normal(size=5)
            v = rng.normal(size=5)
            eta = float(rng.uniform(0.1, 1.5))
            stepped = bregman_prox_step(geom, reg, x, v, eta)
            assert np.array_equal(stepped, prox(reg, x - eta * v, eta))


def test_euclidean_zero_reg_step_is_plain_descent():
    geom = EuclideanGeometry()
    x = np.array([1.0, -2.0])
    v = np.array([0.5, 0.25])
    got = bregman_prox_step(geom, ZeroRegularizer(), x, v, eta=0.8)
    assert np.array_equal(got, x - 0.8 * v)


def test_entropy_step_zero_direction_is_fixed_point():
    geom = EntropyGeometry()
    x = np.array([0.5, 0.5])
    got = bregman_prox_step(geom, ZeroRegularizer(), x, np.zeros(2), eta=1.0)
    assert np.allclose(got, x, rtol=0, atol=1e-15)


def test_entropy_step_closed_form_two_coordinates():
    geom = EntropyGeometry()
    x = np.array([0.5, 0.5])
    v = np.array([1.0, 0.0])
    got = bregman_prox_step(geom, ZeroRegularizer(), x, v, eta=1.0)
    expect = np.array([np.exp(-1.0), 1.0]) / (np.exp(-1.0) + 1.0)
    assert np.allclose(got, expect, rtol=0, atol=1e-12)

    # numeric cross-check: minimize <v,u> + KL(u, x)/eta over the 2-simplex
    def objective(t):
        u = np.array([t, 1.0 - t])
        return float(np.dot(v, u)) + geom.distance(u, x)

    t_star = golden_section(objective, 1e-9, 1.0 - 1e-9, tol=1e-10)
    assert abs(got[0] - t_star) <= 1e-6


def test_entropy_step_stays_on_simplex():
    geom = EntropyGeometry()
    rng = np.random.default_rng(9)
    x = np.full(5, 0.2)
    for _ in range(50):
        v = rng.normal(size=5) * 3.0
        x = bregman_prox_step(geom, ZeroRegularizer(), x, v,
                              eta=float(rng.uniform(0.05, 1.0)))
        assert np.all(x > 0.0)
        assert abs(float(x.sum()) - 1.0) <= 1e-12


def test_entropy_step_rejects_boundary_and_off_simplex_points():
    geom = EntropyGeometry()
    with pytest.raises(DomainError):
        bregman_prox_step(geom, ZeroRegularizer(), np.array([0.0, 1.0]),
                          np.zeros(2), eta=1.0)
    with pytest.raises(DomainError):
        bregman_prox_step(geom, ZeroRegularizer(), np.array([0.4, 0.4]),
                          np.zeros(2), eta=1.0)


def test_entropy_with_l1_is_unsupported():
    with pytest.raises(UnsupportedCombinationError):
        bregman_prox_step(EntropyGeometry(), L1Regularizer(lam=1.0),
                          np.array([0.5, 0.5]), np.zeros(2), eta=1.0)


def test_bregman_step_bills_one_prox_call():
    led = SfoLedger()
    bregman_prox_step(EuclideanGeometry(), L1Regularizer(lam=0.2),
                      np.zeros(3), np.ones(3), eta=0.5, ledger=led)
    assert led.prox_calls == 1
    led2 = SfoLedger()
    bregman_prox_step(EntropyGeometry(), ZeroRegularizer(),
                      np.array([0.5, 0.5]), np.ones(2), eta=0.5, ledger=led2)
    assert led2.prox_calls == 1


def test_bregman_generalized_gradient_euclidean_reduction():
    prob = generate_synthetic_logistic(n=25, d=3, seed=3, alpha_reg=0.1)
    x = np.array([0.2, -0.4, 0.1])
    reg = L1Regularizer(lam=0.3)
    a = bregman_generalized_gradient(prob, EuclideanGeometry(), reg, x, eta=0.6)
    b = generalized_gradient(prob, reg, x, eta=0.6)
    assert np.array_equal(a, b)
