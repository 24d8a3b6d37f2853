"""Integrands: a function on ``[a, b]`` together with exact ``f'`` and ``f''``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IntervalError
from ..expr import Expr, Jet2, compile_expr, parse, unparse

__all__ = [
    "Integrand",
    "ExpressionIntegrand",
    "NativeIntegrand",
    "ExtremalWitness",
    "as_integrand",
    "extremal_eval",
    "derivative_mismatch",
]


class Integrand:
    """Common protocol: ``value``, ``d1``, ``d2``, ``jet`` on floats or arrays.

    ``breakpoints`` lists interior points where ``f`` is only piecewise
    smooth; the integrator starts its cells there.
    """

    kind = "abstract"
    has_second = True
    breakpoints: tuple = ()
    label = "f"

    def value(self, t):
        raise NotImplementedError

    def d1(self, t):
        return self.jet(t).d1

    def d2(self, t):
        if not self.has_second:
            raise NotImplementedError(f"{self.label}: second derivative unavailable")
        return self.jet(t).d2

    def jet(self, t) -> Jet2:
        raise NotImplementedError

    def derivatives(self, t):
        """``(f'(t), f''(t))`` without necessarily computing ``f``."""
        jet = self.jet(t)
        return jet.d1, jet.d2

    def __call__(self, t):
        return self.value(t)

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


class ExpressionIntegrand(Integrand):
    """A parsed expression, differentiated by forward-mode AD."""

    kind = "expression"

    def __init__(self, source: "str | Expr"):
        if isinstance(source, str):
            self.source = source
            self.expr = parse(source)
        else:
            self.expr = source
            self.source = unparse(source)
        self.label = self.source
        self._value = compile_expr(self.expr)
        self._jet = compile_expr(self.expr, jet=True)

    def value(self, t):
        v = self._value(t)
        if np.ndim(t) and np.ndim(v) == 0:
            v = np.full(np.shape(t), float(v))
        return v

    def jet(self, t) -> Jet2:
        return self._jet(t)


class NativeIntegrand(Integrand):
    """Callables for ``f``, ``f'`` and optionally ``f''`` (vectorised)."""

    kind = "native"

    def __init__(self, f, fprime, fsecond=None, label="native", breakpoints=()):
        self._f = f
        self._fp = fprime
        self._fpp = fsecond
        self.has_second = fsecond is not None
        self.label = label
        self.breakpoints = tuple(breakpoints)

    def value(self, t):
        return self._f(t)

    def d1(self, t):
        return self._fp(t)

    def d2(self, t):
        if self._fpp is None:
            raise NotImplementedError(f"{self.label}: second derivative unavailable")
        return self._fpp(t)

    def jet(self, t) -> Jet2:
        return Jet2(self._f(t), self._fp(t), self._fpp(t) if self._fpp else np.nan)


@dataclass(frozen=True)
class ExtremalWitness(Integrand):
    """Five-piece function on ``[0, 1]`` showing the 1/4 slope constant is sharp.

    ``f`` is flat at ``-eps^2/2``, bends up over a width ``eps^2``, rises with
    slope 1 up to ``x - eps^2``, bends flat again over ``eps^2`` and stays at
    ``eps - eps^2/2`` after ``x``. So ``inf f' = 0``, ``sup f' = 1``, ``S = eps``.
    ``f''`` is only piecewise constant, hence not offered.
    """

    epsilon: float
    x: float

    kind = "extremal"
    has_second = False

    def __post_init__(self):
        eps, x = self.epsilon, self.x
        if not 0 < eps < 1 / 8:
            raise IntervalError(f"epsilon must lie in (0, 1/8), got {eps}")
        if not 0.25 <= x <= 0.5:
            raise IntervalError(f"x must lie in [1/4, 1/2], got {x}")
        if not eps + eps * eps < x:
            raise IntervalError("piece ordering violated: need eps + eps^2 < x")

    @property
    def label(self):
        return f"extremal(eps={self.epsilon!r}, x={self.x!r})"

    @property
    def breakpoints(self):
        eps, x = self.epsilon, self.x
        return (x - eps - eps * eps, x - eps, x - eps * eps, x)

    def _pieces(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1):
            raise IntervalError("extremal witness is defined on [0, 1]")
        p1, p2, p3, p4 = self.breakpoints
        return t, [t <= p1, t <= p2, t <= p3, t <= p4]

    def value(self, t):
        eps, x = self.epsilon, self.x
        e2 = eps * eps
        t, conds = self._pieces(t)
        start = x - eps - e2
        out = np.select(
            conds,
            [
                np.full_like(t, -e2 / 2),
                (t - start) ** 2 / (2 * e2) - e2 / 2,
                t - (x - eps),
                -((t - x) ** 2) / (2 * e2) + eps - e2 / 2,
            ],
            default=eps - e2 / 2,
        )
        return float(out) if out.ndim == 0 else out

    def d1(self, t):
        eps, x = self.epsilon, self.x
        e2 = eps * eps
        t, conds = self._pieces(t)
        start = x - eps - e2
        out = np.select(
            conds,
            [np.zeros_like(t), (t - start) / e2, np.ones_like(t), -(t - x) / e2],
            default=0.0,
        )
        return float(out) if out.ndim == 0 else out

    def jet(self, t) -> Jet2:
        return Jet2(self.value(t), self.d1(t), np.nan)

    def __call__(self, t):
        return self.value(t)


def extremal_eval(w: ExtremalWitness, t):
    """``(f(t), f'(t))`` of the extremal witness, by its own piecewise formulas."""
    return w.value(t), w.d1(t)


def as_integrand(f) -> Integrand:
    if isinstance(f, Integrand):
        return f
    if isinstance(f, str):
        return ExpressionIntegrand(f)
    raise TypeError(f"cannot build an integrand from {f!r}")


def derivative_mismatch(f: Integrand, a: float, b: float, rng=None, points: int = 16) -> float:
    """Largest relative gap between AD derivatives and central differences.

    Checks ``f'`` against ``(f(t+h)-f(t-h))/2h`` and, when available, ``f''``
    against the differenced ``f'`` at ``points`` random interior points.
    """
    rng = np.random.default_rng(rng)
    L = b - a
    h = 1e-5 * L
    t = rng.uniform(a + 2 * h, b - 2 * h, size=points)
    worst = 0.0
    fd1 = (f.value(t + h) - f.value(t - h)) / (2 * h)
    d1 = f.d1(t)
    scale = np.abs(f.value(t)) / L + np.abs(d1) + 1.0
    worst = max(worst, float(np.max(np.abs(fd1 - d1) / scale)))
    if f.has_second:
        fd2 = (f.d1(t + h) - f.d1(t - h)) / (2 * h)
        d2 = f.d2(t)
        scale = np.abs(d1) / L + np.abs(d2) + 1.0
        worst = max(worst, float(np.max(np.abs(fd2 - d2) / scale)))
    return worst
