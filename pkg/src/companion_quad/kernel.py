"""The three-branch Peano-type kernel of the companion two-point rule.

For ``x`` in ``[a, (a+b)/2]``::

    K(x, t) = t - a          on [a, x]
              t - (a+b)/2    on (x, a+b-x]
              t - b          on (a+b-x, b]

Its inner product with ``f'`` reproduces the error of the two-point average
``(f(x) + f(a+b-x))/2`` against the mean of ``f``; the closed-form functionals
below are shared by every bound in :mod:`companion_quad.bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntervalError

__all__ = [
    "IntervalCtx",
    "KERNEL_L2_CONSTANT",
    "kernel_eval",
    "kernel_mean",
    "kernel_max_abs",
    "kernel_l2_bracket",
    "kernel_l2_sq",
    "companion_average",
    "companion_lhs",
]

# (b-a)^2 coefficient in the squared L2 norm of K; its square root is 1/(4*sqrt(3)).
KERNEL_L2_CONSTANT = 1.0 / 48.0


@dataclass(frozen=True)
class IntervalCtx:
    """Interval ``[a, b]`` and evaluation point ``a <= x <= (a+b)/2``."""

    a: float
    b: float
    x: float

    def __post_init__(self):
        a, b, x = float(self.a), float(self.b), float(self.x)
        if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(x)):
            raise IntervalError(f"non-finite interval context ({a}, {b}, {x})")
        if not a < b:
            raise IntervalError(f"need a < b, got a={a}, b={b}")
        if not a <= x <= (a + b) / 2:
            raise IntervalError(f"need a <= x <= (a+b)/2, got x={x} on [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "x", x)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return (self.a + self.b) / 2

    @property
    def quarter_point(self) -> float:
        """``(3a+b)/4``, where every x-dependent factor is minimal."""
        return (3 * self.a + self.b) / 4

    @property
    def mirror(self) -> float:
        """The companion node ``a + b - x``, kept inside ``[(a+b)/2, b]`` under rounding."""
        return min(max(self.a + self.b - self.x, self.midpoint), self.b)

    @property
    def offset(self) -> float:
        """Signed distance ``x - (3a+b)/4``."""
        return self.x - self.quarter_point

    def with_x(self, x: float) -> "IntervalCtx":
        return IntervalCtx(self.a, self.b, x)


def kernel_eval(ctx: IntervalCtx, t):
    """Evaluate ``K(x, t)``; ``t`` may be an array."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < ctx.a) or np.any(t_arr > ctx.b):
        raise IntervalError(f"t outside [{ctx.a}, {ctx.b}]")
    out = np.where(
        t_arr <= ctx.x,
        t_arr - ctx.a,
        np.where(t_arr <= ctx.mirror, t_arr - ctx.midpoint, t_arr - ctx.b),
    )
    return float(out) if out.ndim == 0 else out


def kernel_mean(ctx: IntervalCtx) -> float:
    """``(1/(b-a)) * integral of K`` in closed form; identically zero."""
    outer = (ctx.x - ctx.a) ** 2 / 2
    half = ctx.midpoint - ctx.x
    # first and last branch cancel; the middle branch is odd about the midpoint
    middle = (half**2 - (-half) ** 2) / 2
    return (outer + middle - outer) / ctx.length


def kernel_max_abs(ctx: IntervalCtx) -> float:
    """``max |K(x, .)| = (b-a)/4 + |x - (3a+b)/4|``."""
    return ctx.length / 4 + abs(ctx.offset)


def kernel_l2_bracket(ctx: IntervalCtx) -> float:
    """``(b-a)^2/48 + (x - (3a+b)/4)^2``, the factor under every square root."""
    return ctx.length**2 * KERNEL_L2_CONSTANT + ctx.offset**2


def kernel_l2_sq(ctx: IntervalCtx) -> float:
    """``integral of K(x,t)^2 dt`` over ``[a, b]``."""
    return kernel_l2_bracket(ctx) * ctx.length


def companion_average(f, ctx: IntervalCtx) -> float:
    """``(f(x) + f(a+b-x)) / 2`` for any callable or integrand ``f``."""
    fx = f(ctx.x)
    fy = f(ctx.mirror)
    return float((fx + fy) / 2)


def companion_lhs(f, ctx: IntervalCtx, mean: float) -> float:
    """``|(f(x) + f(a+b-x))/2 - mean|``, the quantity every pointwise bound controls."""
    return abs(companion_average(f, ctx) - mean)
