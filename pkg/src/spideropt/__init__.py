"""Variance-reduced stochastic first-order methods with exact oracle billing.

The estimator keeps a recursive gradient surrogate that is refreshed from a
large anchor batch every q steps and corrected from small paired minibatches
in between. Solvers built on it cover smooth minimization (sarah, spider,
spiderboost), composite objectives with a proximal or Bregman step
(prox-spiderboost, prox-spiderboost-o), and a restarted variant for
gradient-dominated problems (prox-spiderboost-gd). Every run returns a trace
with per-iteration SFO/PO counts that reconcile against closed forms.
"""

from .composite import (CompositeSolverConfig, DominanceReport, beta2,
                        check_gradient_dominance, gd_epoch_length,
                        online_anchor_batch, online_iteration_budget,
                        run_composite, run_prox_spiderboost,
                        run_prox_spiderboost_gd, run_prox_spiderboost_o)
from .errors import (ConfigError, DatasetParseError, DomainError,
                     EpochViolationError, SolverAbort, SpideroptError,
                     UnsupportedCombinationError)
from .estimator import (SpiderEstimator, VarianceGapReport,
                        variance_gap_estimate)
from .families import (DiagQuadraticProblem, LeastSquaresProblem,
                       ValleyOracle, ValleyProblem, first_crossing_estimate,
                       planted_least_squares)
from .gradcheck import (central_difference_gradient, check_problem_gradients,
                        relative_gradient_error)
from .ledger import LedgerPair, SfoLedger, epoch_convention_total, per_index_total
from .problems import (ComponentListProblem, FiniteSumOnlineOracle,
                       FiniteSumProblem, GaussianMeanOracle, OnlineOracle,
                       RegLogisticProblem, full_gradient,
                       generate_synthetic_logistic, load_libsvm,
                       load_libsvm_problem, minibatch_gradient, problem_value)
from .proximal import (BoxIndicator, BregmanGeometry, CustomRegularizer,
                       EntropyGeometry, EuclideanGeometry, L1Regularizer,
                       Regularizer, ZeroRegularizer, bregman_generalized_gradient,
                       bregman_prox_step, generalized_gradient, prox)
from .smooth import (RunTrace, SmoothSolverConfig, TraceRow, beta1,
                     run_sarah, run_smooth, run_spider, run_spiderboost,
                     theorem_iteration_budget)

__version__ = "0.1.0"

__all__ = [
    "BoxIndicator",
    "BregmanGeometry",
    "ComponentListProblem",
    "CompositeSolverConfig",
    "ConfigError",
    "CustomRegularizer",
    "DatasetParseError",
    "DiagQuadraticProblem",
    "DomainError",
    "DominanceReport",
    "EntropyGeometry",
    "EpochViolationError",
    "EuclideanGeometry",
    "FiniteSumOnlineOracle",
    "FiniteSumProblem",
    "GaussianMeanOracle",
    "L1Regularizer",
    "LeastSquaresProblem",
    "LedgerPair",
    "OnlineOracle",
    "RegLogisticProblem",
    "Regularizer",
    "RunTrace",
    "SfoLedger",
    "SmoothSolverConfig",
    "SolverAbort",
    "SpiderEstimator",
    "SpideroptError",
    "TraceRow",
    "UnsupportedCombinationError",
    "ValleyOracle",
    "ValleyProblem",
    "VarianceGapReport",
    "ZeroRegularizer",
    "beta1",
    "beta2",
    "bregman_generalized_gradient",
    "bregman_prox_step",
    "central_difference_gradient",
    "check_gradient_dominance",
    "check_problem_gradients",
    "epoch_convention_total",
    "first_crossing_estimate",
    "full_gradient",
    "gd_epoch_length",
    "generalized_gradient",
    "generate_synthetic_logistic",
    "load_libsvm",
    "load_libsvm_problem",
    "minibatch_gradient",
    "online_anchor_batch",
    "online_iteration_budget",
    "per_index_total",
    "planted_least_squares",
    "problem_value",
    "prox",
    "relative_gradient_error",
    "run_composite",
    "run_prox_spiderboost",
    "run_prox_spiderboost_gd",
    "run_prox_spiderboost_o",
    "run_sarah",
    "run_smooth",
    "run_spider",
    "run_spiderboost",
    "theorem_iteration_budget",
    "variance_gap_estimate",
]
