"""Companion bounds for a density on ``[a, b]``: CDF average versus expectation.

Applying the pointwise bounds to the CDF ``F`` (so ``F' = f``, ``F'' = f'``
and the secant slope is ``1/(b-a)``) gives bounds on
``|(F(x) + F(a+b-x))/2 - (b - E X)/(b-a)|``.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Optional

import numpy as np

from .bounds import DerivativeStats, clamp_sigma
from .errors import BoundInputError, DensityError
from .expr import Jet2
from .kernel import IntervalCtx, kernel_l2_bracket, kernel_max_abs
from .oracle.integrands import Integrand, as_integrand
from .oracle.integrate import integrate
from .oracle.stats import SAMPLES, estimate_stats

__all__ = [
    "DensityCtx",
    "CdfIntegrand",
    "MASS_TOL",
    "prob_lhs",
    "prob_bound_th41",
    "prob_bound_th42",
    "prob_bound_th43",
    "density_stats",
    "all_prob_bounds",
]

MASS_TOL = 1e-8
NORMALISABLE = (0.5, 2.0)


class _Scaled(Integrand):
    kind = "scaled"

    def __init__(self, base: Integrand, factor: float):
        self.base = base
        self.factor = factor
        self.has_second = base.has_second
        self.breakpoints = base.breakpoints
        self.label = f"({base.label})/{1 / factor!r}"

    def value(self, t):
        return self.base.value(t) * self.factor

    def d1(self, t):
        return self.base.d1(t) * self.factor

    def d2(self, t):
        return self.base.d2(t) * self.factor

    def jet(self, t):
        return self.base.jet(t) * self.factor


class DensityCtx:
    """A probability density on ``[a, b]`` with its CDF and expectation.

    Build with :meth:`from_pdf`, which scans the density for negative values,
    computes its mass and rescales it when the mass is off by at most a
    factor 2 (``normalized`` is then set). ``total_mass`` is the mass as
    supplied.
    """

    def __init__(self, pdf: Integrand, a: float, b: float, total_mass: float, normalized: bool, rel_tol=None):
        self.pdf = pdf
        self.a = float(a)
        self.b = float(b)
        self.total_mass = total_mass
        self.normalized = normalized
        self.rel_tol = rel_tol
        self._cdf_memo: dict = {}
        self.expectation, _ = integrate(lambda t: t * np.asarray(pdf.value(t)), self.a, self.b, rel_tol)
        if not self.a - 1e-12 <= self.expectation <= self.b + 1e-12:
            raise DensityError(f"expectation {self.expectation} outside [{a}, {b}]")

    @classmethod
    def from_pdf(cls, pdf, a: float, b: float, rel_tol=None) -> "DensityCtx":
        pdf = as_integrand(pdf)
        if not a < b:
            raise DensityError(f"need a < b, got [{a}, {b}]")
        grid = np.linspace(a, b, SAMPLES)
        vals = np.broadcast_to(np.asarray(pdf.value(grid), dtype=float), grid.shape)
        if np.any(vals < 0):
            where = grid[np.argmax(vals < 0)]
            raise DensityError(f"density is negative at t={where:.17g}")
        mass, _ = integrate(pdf, a, b, rel_tol)
        if abs(mass - 1.0) <= MASS_TOL:
            return cls(pdf, a, b, mass, False, rel_tol)
        lo, hi = NORMALISABLE
        if not lo <= mass <= hi:
            raise DensityError(f"density mass {mass:.17g} is outside [{lo}, {hi}]")
        return cls(_Scaled(pdf, 1.0 / mass), a, b, mass, True, rel_tol)

    @property
    def length(self) -> float:
        return self.b - self.a

    def cdf(self, x):
        """``F(x) = integral of f over [a, x]``, memoised per point."""
        if np.ndim(x):
            return np.array([self.cdf(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))
        x = float(x)
        if x in self._cdf_memo:
            return self._cdf_memo[x]
        if x <= self.a:
            value = 0.0
        else:
            value, _ = integrate(self.pdf, self.a, min(x, self.b), self.rel_tol)
        return self._cdf_memo.setdefault(x, value)

    def expectation_from_cdf(self) -> float:
        """``b - integral of F``, by nested integration; matches :attr:`expectation`."""
        integral, _ = integrate(self.cdf, self.a, self.b, max(self.rel_tol or 0.0, 1e-10))
        return self.b - integral

    def cdf_integrand(self) -> "CdfIntegrand":
        return CdfIntegrand(self)


class CdfIntegrand(Integrand):
    """``F`` seen as an integrand: derivatives come from the density itself."""

    kind = "cdf"

    def __init__(self, density: DensityCtx):
        self.density = density
        self.has_second = density.pdf.has_second
        self.breakpoints = density.pdf.breakpoints
        self.label = f"cdf[{density.pdf.label}]"

    def value(self, t):
        return self.density.cdf(t)

    def d1(self, t):
        return self.density.pdf.value(t)

    def d2(self, t):
        return self.density.pdf.d1(t)

    def jet(self, t):
        pj = self.density.pdf.jet(t)
        return Jet2(self.density.cdf(t), pj.value, pj.d1)

    def derivatives(self, t):
        pj = self.density.pdf.jet(t)
        return pj.value, pj.d1


def density_stats(d: DensityCtx) -> DerivativeStats:
    """Stats of the CDF: ``gamma``/``Gamma`` bound the density, ``||F'||_2 = ||f||_2``
    and ``||F''||_2 = ||f'||_2``. The secant slope is exactly ``1/(b-a)``.
    """
    stats = estimate_stats(d.cdf_integrand(), d.a, d.b, rel_tol=d.rel_tol)
    return replace(stats, S=1.0 / d.length)


def _check_ctx(d: DensityCtx, ctx: IntervalCtx):
    if ctx.a != d.a or ctx.b != d.b:
        raise BoundInputError("interval context does not match the density's support")


def prob_lhs(d: DensityCtx, ctx: IntervalCtx) -> float:
    """``|(F(x) + F(a+b-x))/2 - (b - E X)/(b - a)|``."""
    _check_ctx(d, ctx)
    avg = 0.5 * (d.cdf(ctx.x) + d.cdf(ctx.mirror))
    return abs(avg - (d.b - d.expectation) / d.length)


def prob_bound_th41(d: DensityCtx, ctx: IntervalCtx, gamma: float, Gamma: float) -> tuple[float, float]:
    """Slope-form bounds with ``gamma <= f <= Gamma`` on ``[a, b]``."""
    _check_ctx(d, ctx)
    level = 1.0 / d.length
    tol = 1e-12 * (1 + level)
    if gamma > level + tol or Gamma < level - tol:
        raise BoundInputError(
            f"need gamma <= 1/(b-a) <= Gamma for a density, got {gamma!r}, {level!r}, {Gamma!r}"
        )
    bracket = kernel_max_abs(ctx)
    return bracket * max(level - gamma, 0.0), bracket * max(Gamma - level, 0.0)


def prob_bound_th42(d: DensityCtx, ctx: IntervalCtx, l2_pdf_deriv: float) -> float:
    """``sqrt(b-a)/pi * sqrt(bracket) * ||f'||_2``."""
    _check_ctx(d, ctx)
    return math.sqrt(d.length) / math.pi * math.sqrt(kernel_l2_bracket(ctx)) * l2_pdf_deriv


def prob_bound_th43(d: DensityCtx, ctx: IntervalCtx, l2_pdf: float) -> float:
    """``(b-a)^(-1/2) * sqrt(bracket) * sqrt(||f||_2^2 - 1/(b-a))``."""
    _check_ctx(d, ctx)
    sigma = clamp_sigma(l2_pdf**2 - 1.0 / d.length, l2_pdf**2)
    return math.sqrt(kernel_l2_bracket(ctx) / d.length) * math.sqrt(sigma)


def all_prob_bounds(d: DensityCtx, ctx: IntervalCtx, stats: Optional[DerivativeStats] = None,
                    gamma: Optional[float] = None, Gamma: Optional[float] = None) -> dict:
    """Lhs and every density bound at ``ctx``; missing inputs are estimated."""
    if stats is None:
        stats = density_stats(d).widened()
    g = stats.gamma if gamma is None else gamma
    G = stats.Gamma if Gamma is None else Gamma
    th41 = prob_bound_th41(d, ctx, g, G)
    out = {
        "lhs": prob_lhs(d, ctx),
        "th41g": th41[0],
        "th41G": th41[1],
        "th42": prob_bound_th42(d, ctx, stats.l2_fsecond) if stats.l2_fsecond is not None else None,
        "th43": prob_bound_th43(d, ctx, stats.l2_fprime),
        "gamma": g,
        "Gamma": G,
        "expectation": d.expectation,
    }
    return out
