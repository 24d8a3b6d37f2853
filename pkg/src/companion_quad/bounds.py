"""Right-hand sides of the pointwise companion inequalities.

Every function takes an :class:`~companion_quad.kernel.IntervalCtx` and a
:class:`DerivativeStats` and returns the bound on
``|(f(x) + f(a+b-x))/2 - mean(f)|``. The new estimates (slope form, ``f''``
in L2, ``f'`` in L2) sit next to the older baselines they are compared with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import BoundInputError
from .kernel import IntervalCtx, companion_lhs, kernel_l2_bracket, kernel_max_abs

__all__ = [
    "DerivativeStats",
    "BoundEntry",
    "BoundReport",
    "BOUND_IDS",
    "SIGMA_CLAMP",
    "clamp_sigma",
    "bound_th21",
    "bound_th22",
    "bound_th23",
    "bound_dragomir",
    "bound_alomari",
    "best_bound",
]

# fixed order; also the tie-break order for the tightest bound
BOUND_IDS = (
    "th23",
    "th22",
    "th21g",
    "th21G",
    "alomari",
    "dragomir_inf",
    "dragomir_p",
    "dragomir_1",
)

SIGMA_CLAMP = 1e-12
_ORDER_TOL = 1e-12


@dataclass(frozen=True)
class DerivativeStats:
    """Derivative information of ``f`` on ``[a, b]`` consumed by the bounds.

    ``gamma``/``Gamma`` bound ``f'`` from below/above, ``S`` is the secant
    slope. Norms that could not be computed are ``None``; the bounds that
    need them are then reported as not applicable.
    """

    a: float
    b: float
    gamma: float
    Gamma: float
    S: float
    l2_fprime: Optional[float] = None
    l2_fsecond: Optional[float] = None
    l1_fprime: Optional[float] = None
    p: float = 2.0
    lp_fprime: Optional[float] = None
    refined: bool = False
    extras: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def sigma_fprime(self) -> Optional[float]:
        """``||f'||_2^2 - S^2 (b-a)``; non-negative by Cauchy-Schwarz."""
        if self.l2_fprime is None:
            return None
        return self.l2_fprime**2 - self.S**2 * self.length

    @property
    def linf_fprime(self) -> float:
        return max(abs(self.gamma), abs(self.Gamma))

    def widened(self, rel: float = 1e-9) -> "DerivativeStats":
        """Copy with ``gamma`` pushed down and ``Gamma`` up by ``rel*(1+|v|)``.

        Sampled extrema can sit slightly inside the true range of ``f'``;
        widening keeps the slope bounds honest under that error.
        """
        return replace(
            self,
            gamma=self.gamma - rel * (1 + abs(self.gamma)),
            Gamma=self.Gamma + rel * (1 + abs(self.Gamma)),
        )

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "gamma": self.gamma,
            "Gamma": self.Gamma,
            "S": self.S,
            "l2_fprime": self.l2_fprime,
            "l2_fsecond": self.l2_fsecond,
            "l1_fprime": self.l1_fprime,
            "p": self.p,
            "lp_fprime": self.lp_fprime,
            "sigma_fprime": self.sigma_fprime,
            "refined": self.refined,
        }


@dataclass(frozen=True)
class BoundEntry:
    bound_id: str
    rhs: Optional[float]
    applicable: bool


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    entries: tuple
    tightest: Optional[str]
    ctx: IntervalCtx
    mean: float = math.nan

    def rhs(self, bound_id: str) -> Optional[float]:
        for entry in self.entries:
            if entry.bound_id == bound_id:
                return entry.rhs
        raise KeyError(bound_id)

    def applicable(self):
        return [e for e in self.entries if e.applicable]

    def violations(self, rel_tol: float = 1e-7):
        """Entries whose rhs is exceeded by lhs beyond ``rel_tol*(1+|rhs|)``."""
        return [e for e in self.applicable() if self.lhs > e.rhs + rel_tol * (1 + abs(e.rhs))]

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "mean": self.mean,
            "ctx": {"a": self.ctx.a, "b": self.ctx.b, "x": self.ctx.x},
            "entries": [
                {"bound_id": e.bound_id, "rhs": e.rhs, "applicable": e.applicable}
                for e in self.entries
            ],
            "tightest": self.tightest,
        }


def clamp_sigma(sigma: float, scale: float = 1.0) -> float:
    """Clamp roundoff-level negative variance to zero; reject real negatives.

    ``scale`` is the magnitude of the terms that were subtracted, so that the
    clamp window is relative to the cancellation that produced ``sigma``.
    """
    if sigma >= 0:
        return sigma
    if sigma >= -SIGMA_CLAMP * max(1.0, abs(scale)):
        return 0.0
    raise BoundInputError(f"variance functional is negative ({sigma:.3e}); inconsistent norms")


def _check_slope_order(stats: DerivativeStats):
    tol = _ORDER_TOL * (1 + abs(stats.S))
    if stats.gamma > stats.S + tol or stats.S > stats.Gamma + tol:
        raise BoundInputError(
            f"need gamma <= S <= Gamma, got {stats.gamma!r} <= {stats.S!r} <= {stats.Gamma!r}"
        )


def bound_th21(ctx: IntervalCtx, stats: DerivativeStats) -> tuple[float, float]:
    """Slope-form bounds ``[(b-a)/4 + |x-(3a+b)/4|] * (S-gamma)`` and ``* (Gamma-S)``."""
    _check_slope_order(stats)
    bracket = kernel_max_abs(ctx)
    return bracket * max(stats.S - stats.gamma, 0.0), bracket * max(stats.Gamma - stats.S, 0.0)


def bound_th22(ctx: IntervalCtx, stats: DerivativeStats) -> float:
    """Second-derivative bound ``sqrt(b-a)/pi * sqrt(bracket) * ||f''||_2``."""
    if stats.l2_fsecond is None:
        raise BoundInputError("||f''||_2 is not available")
    return math.sqrt(ctx.length) / math.pi * math.sqrt(kernel_l2_bracket(ctx)) * stats.l2_fsecond


def bound_th23(ctx: IntervalCtx, stats: DerivativeStats) -> float:
    """First-derivative L2 bound ``(b-a)^(-1/2) * sqrt(bracket) * sqrt(sigma(f'))``."""
    if stats.l2_fprime is None:
        raise BoundInputError("||f'||_2 is not available")
    sigma = clamp_sigma(stats.sigma_fprime, stats.l2_fprime**2)
    return math.sqrt(kernel_l2_bracket(ctx) / ctx.length) * math.sqrt(sigma)


def bound_dragomir(ctx: IntervalCtx, stats: DerivativeStats, p: float = 2.0):
    """The three older baselines: sup-norm, Lp (``p > 1``) and L1 forms.

    Returns ``(rhs_inf, rhs_p, rhs_1)``; an entry is ``None`` when its norm
    is missing from ``stats``. ``||f'||_inf`` is taken as ``max(|gamma|, |Gamma|)``.
    """
    if not p > 1:
        raise BoundInputError(f"need p > 1, got {p}")
    L = ctx.length
    r = ctx.offset / L
    rhs_inf = (1 / 8 + 2 * r * r) * L * stats.linf_fprime

    rhs_p = None
    if stats.lp_fprime is not None and stats.p == p:
        q = p / (p - 1)
        u = (ctx.x - ctx.a) / L
        v = (ctx.midpoint - ctx.x) / L
        rhs_p = (
            2 ** (1 / q)
            / (q + 1) ** (1 / q)
            * (u ** (q + 1) + v ** (q + 1)) ** (1 / q)
            * L ** (1 / q)
            * stats.lp_fprime
        )

    rhs_1 = None
    if stats.l1_fprime is not None:
        rhs_1 = (1 / 4 + abs(r)) * stats.l1_fprime
    return rhs_inf, rhs_p, rhs_1


def bound_alomari(ctx: IntervalCtx, stats: DerivativeStats) -> float:
    """``[1/16 + ((x-(3a+b)/4)/(b-a))^2] * (b-a) * (Gamma - gamma)``."""
    r = ctx.offset / ctx.length
    return (1 / 16 + r * r) * ctx.length * (stats.Gamma - stats.gamma)


def best_bound(f, ctx: IntervalCtx, stats: DerivativeStats, mean: float) -> BoundReport:
    """Evaluate every bound at ``ctx`` and tag the tightest applicable one."""
    lhs = companion_lhs(f, ctx, mean)
    values: dict[str, Optional[float]] = dict.fromkeys(BOUND_IDS)

    values["th21g"], values["th21G"] = bound_th21(ctx, stats)
    values["alomari"] = bound_alomari(ctx, stats)
    if stats.l2_fprime is not None:
        values["th23"] = bound_th23(ctx, stats)
    if stats.l2_fsecond is not None:
        values["th22"] = bound_th22(ctx, stats)
    values["dragomir_inf"], values["dragomir_p"], values["dragomir_1"] = bound_dragomir(
        ctx, stats, stats.p
    )

    entries = tuple(
        BoundEntry(bid, values[bid], values[bid] is not None and math.isfinite(values[bid]))
        for bid in BOUND_IDS
    )
    candidates = [e for e in entries if e.applicable]
    tightest = None
    if candidates:
        # min() keeps the first of equal keys, i.e. the fixed id order
        tightest = min(candidates, key=lambda e: e.rhs).bound_id
    return BoundReport(lhs=lhs, entries=entries, tightest=tightest, ctx=ctx, mean=mean)
