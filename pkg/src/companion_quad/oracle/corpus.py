"""Deterministic random corpus of integrands, intervals and densities.

Entry ``i`` of seed ``s`` is drawn from its own generator
``default_rng([s, i])``, so an entry never depends on how many were requested
or on which worker builds it.
"""

from __future__ import annotations

import math

import numpy as np

from ..kernel import IntervalCtx
from .integrands import ExpressionIntegrand

__all__ = ["make_corpus", "corpus_entry", "density_entry", "make_density_corpus", "horner"]

_DENSITY_STREAM = 1


def _num(c: float) -> str:
    return repr(float(c))


def horner(coefs, var: str = "t") -> str:
    """Horner-form text for ``sum(coefs[k] * var**k)``."""
    text = _num(coefs[-1])
    for c in reversed(coefs[:-1]):
        text = f"{_num(c)} + {var}*({text})"
    return text


def _interval(rng) -> IntervalCtx:
    a = rng.uniform(-2.0, 2.0)
    b = a + rng.uniform(0.5, 4.0)
    mid = (a + b) / 2
    x = min(a + rng.uniform() * (mid - a), mid)
    return IntervalCtx(a, b, x)


def corpus_entry(seed: int, index: int):
    """``(integrand, ctx)`` number ``index`` of the corpus for ``seed``.

    Half the entries are polynomials of degree <= 8 with coefficients in
    [-3, 3]; the rest are ``c1 sin(c2 t) + c3 exp(c4 t)`` mixtures.
    """
    rng = np.random.default_rng([seed, index])
    ctx = _interval(rng)
    if rng.uniform() < 0.5:
        degree = int(rng.integers(0, 9))
        coefs = np.round(rng.uniform(-3.0, 3.0, degree + 1), 6)
        source = horner(list(coefs))
    else:
        c1, c2, c3 = np.round(rng.uniform(-3.0, 3.0, 3), 6)
        c4 = round(float(rng.uniform(-1.5, 1.5)), 6)
        source = f"{_num(c1)}*sin({_num(c2)}*t) + {_num(c3)}*exp({_num(c4)}*t)"
    return ExpressionIntegrand(source), ctx


def make_corpus(seed: int, count: int):
    """List of ``count`` deterministic ``(integrand, ctx)`` pairs."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [corpus_entry(seed, i) for i in range(count)]


def density_entry(seed: int, index: int, a: float, b: float) -> ExpressionIntegrand:
    """A normalised density on ``[a, b]``.

    Either a polynomial with non-negative coefficients in ``s = (t-a)/(b-a)``
    (degree <= 4, positive constant term) or a truncated exponential
    ``lam * exp(lam (t-a)) / (exp(lam (b-a)) - 1)``. Both are normalised in
    closed form.
    """
    rng = np.random.default_rng([seed, index, _DENSITY_STREAM])
    L = b - a
    s = f"((t - {_num(a)})/{_num(L)})"
    if rng.uniform() < 0.5:
        degree = int(rng.integers(0, 5))
        coefs = np.round(rng.uniform(0.0, 2.0, degree + 1), 6)
        coefs[0] = max(coefs[0], 0.1)
        mass = L * sum(c / (k + 1) for k, c in enumerate(coefs))
        return ExpressionIntegrand(f"({horner(list(coefs), s)})/{_num(mass)}")
    lam = round(float(rng.uniform(0.1, 3.0) * rng.choice([-1.0, 1.0])), 6)
    scale = lam / math.expm1(lam * L)
    return ExpressionIntegrand(f"{_num(scale)}*exp({_num(lam)}*(t - {_num(a)}))")


def make_density_corpus(seed: int, count: int):
    """``count`` triples ``(pdf, a, b)`` on the corpus intervals."""
    out = []
    for i in range(count):
        _, ctx = corpus_entry(seed, i)
        out.append((density_entry(seed, i, ctx.a, ctx.b), ctx.a, ctx.b))
    return out
