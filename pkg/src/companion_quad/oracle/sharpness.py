"""End-to-end sharpness check of the slope-form constant 1/4."""

from __future__ import annotations

from typing import NamedTuple

from ..bounds import bound_th21
from ..kernel import IntervalCtx, companion_lhs
from .integrands import ExtremalWitness
from .integrate import integrate
from .stats import estimate_stats

__all__ = ["SharpnessRow", "sharpness_row", "sharpness_ratio", "predicted_ratio"]


class SharpnessRow(NamedTuple):
    epsilon: float
    lhs: float
    rhs: float
    ratio: float


def predicted_ratio(epsilon: float, x: float) -> float:
    """Closed form ``1 - (eps + eps^2) / (2x)`` of the witness' lhs/rhs."""
    return 1.0 - (epsilon + epsilon * epsilon) / (2.0 * x)


def sharpness_row(epsilon: float, x: float, rel_tol=None) -> SharpnessRow:
    """Run the witness through the oracle mean, the stats and the slope bound."""
    w = ExtremalWitness(epsilon, x)
    ctx = IntervalCtx(0.0, 1.0, x)
    mean, _ = integrate(w, 0.0, 1.0, rel_tol)
    stats = estimate_stats(w, 0.0, 1.0, rel_tol=rel_tol)
    lhs = companion_lhs(w, ctx, mean)
    rhs, _ = bound_th21(ctx, stats)
    return SharpnessRow(epsilon, lhs, rhs, lhs / rhs)


def sharpness_ratio(epsilon: float, x: float, rel_tol=None) -> float:
    """Lhs over the ``S - gamma`` slope bound for the extremal witness.

    Tends to 1 as ``epsilon`` shrinks, so the constant 1/4 cannot be lowered.
    """
    return sharpness_row(epsilon, x, rel_tol).ratio
