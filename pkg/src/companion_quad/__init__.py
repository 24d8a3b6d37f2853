"""Companion two-point quadrature: error bounds, composite rule and checks.

The rule averages ``f`` at ``x`` and its mirror ``a + b - x``; the package
bounds its deviation from the mean of ``f`` in terms of derivative data,
builds the composite rule on top of it, and checks every bound against an
independent numerical oracle.
"""

__version__ = "0.1.0"

from .bounds import (
    BOUND_IDS,
    BoundEntry,
    BoundReport,
    DerivativeStats,
    best_bound,
    bound_alomari,
    bound_dragomir,
    bound_th21,
    bound_th22,
    bound_th23,
)
from .errors import (
    BoundInputError,
    CompanionQuadError,
    DensityError,
    EvaluationDomainError,
    ExpressionSyntaxError,
    IntegrationError,
    IntervalError,
    UnknownIdentifierError,
)
from .expr import Jet2, compile_expr, eval_jet, evaluate, parse, unparse
from .kernel import (
    KERNEL_L2_CONSTANT,
    IntervalCtx,
    companion_average,
    companion_lhs,
    kernel_eval,
    kernel_l2_bracket,
    kernel_l2_sq,
    kernel_max_abs,
    kernel_mean,
)
from .oracle import ExpressionIntegrand, NativeIntegrand, estimate_stats, integrate, sharpness_ratio
from .probability import DensityCtx, all_prob_bounds, prob_bound_th41, prob_bound_th42, prob_bound_th43, prob_lhs
from .quadrature import (
    Partition,
    QuadratureResult,
    adaptive_partition,
    certify,
    composite_rule,
    convergence_study,
    remainder_th31,
    remainder_th32,
    remainder_th33,
)
from .verification import run_trial, verify

__all__ = [
    "__version__",
    "BOUND_IDS",
    "BoundEntry",
    "BoundReport",
    "DerivativeStats",
    "best_bound",
    "bound_alomari",
    "bound_dragomir",
    "bound_th21",
    "bound_th22",
    "bound_th23",
    "CompanionQuadError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "EvaluationDomainError",
    "IntervalError",
    "IntegrationError",
    "BoundInputError",
    "DensityError",
    "Jet2",
    "parse",
    "unparse",
    "evaluate",
    "eval_jet",
    "compile_expr",
    "KERNEL_L2_CONSTANT",
    "IntervalCtx",
    "kernel_eval",
    "kernel_mean",
    "kernel_max_abs",
    "kernel_l2_bracket",
    "kernel_l2_sq",
    "companion_average",
    "companion_lhs",
    "ExpressionIntegrand",
    "NativeIntegrand",
    "estimate_stats",
    "integrate",
    "sharpness_ratio",
    "DensityCtx",
    "prob_lhs",
    "prob_bound_th41",
    "prob_bound_th42",
    "prob_bound_th43",
    "all_prob_bounds",
    "Partition",
    "QuadratureResult",
    "composite_rule",
    "certify",
    "remainder_th31",
    "remainder_th32",
    "remainder_th33",
    "convergence_study",
    "adaptive_partition",
    "run_trial",
    "verify",
]
