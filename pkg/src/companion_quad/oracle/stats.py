"""Derivative bounds and norms of an integrand, as consumed by the bounds."""

from __future__ import annotations

import math

import numpy as np

from ..bounds import DerivativeStats
from .integrands import Integrand
from .integrate import integrate

__all__ = ["SAMPLES", "XTOL", "extremes", "sign_change_roots", "estimate_stats"]

SAMPLES = 4097
XTOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _candidates(values, sign, count):
    """Indices of the ``count`` best local minima of ``sign * values``."""
    v = sign * values
    left = np.concatenate([[np.inf], v[:-1]])
    right = np.concatenate([v[1:], [np.inf]])
    local = np.flatnonzero((v <= left) & (v <= right))
    order = np.argsort(v[local], kind="stable")
    return local[order[:count]]


def _golden(g, lo, hi, signs, xtol):
    """Vectorised golden-section minimisation of ``signs * g`` on each bracket.

    Returns the best value of ``signs * g`` seen in each bracket.
    """
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    both = np.asarray(g(np.concatenate([c, d])), dtype=float)
    n = lo.size
    fc, fd = signs * both[:n], signs * both[n:]
    best = np.minimum(fc, fd)
    while np.max(hi - lo) > xtol:
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - _INVPHI * (hi - lo)
        new_d = lo + _INVPHI * (hi - lo)
        probe = np.where(left, new_c, new_d)
        fp = signs * np.asarray(g(probe), dtype=float)
        fc, fd, c, d = (
            np.where(left, fp, fd),
            np.where(left, fc, fp),
            np.where(left, new_c, d),
            np.where(left, c, new_d),
        )
        best = np.minimum(best, fp)
    return best


def extremes(g, a: float, b: float, samples: int = SAMPLES, candidates: int = 3, grid=None, values=None):
    """Estimate ``(min g, max g, refined)`` over ``[a, b]``.

    ``g`` is sampled on ``samples`` equispaced points; the ``candidates`` best
    local extrema of each kind are then polished by golden-section search on
    their neighbouring grid cells. ``refined`` tells whether the search moved
    either extreme beyond the sampled value. Pass ``grid``/``values`` to reuse
    an existing sampling.
    """
    if grid is None:
        grid = np.linspace(a, b, samples)
        values = np.asarray(g(grid), dtype=float)
    if values.ndim == 0:
        values = np.full(grid.shape, float(values))
    lo_sample, hi_sample = float(values.min()), float(values.max())

    idx_min = _candidates(values, 1.0, candidates)
    idx_max = _candidates(values, -1.0, candidates)
    idx = np.concatenate([idx_min, idx_max])
    signs = np.concatenate([np.ones(idx_min.size), -np.ones(idx_max.size)])
    last = grid.size - 1
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, last)]
    # value error near a smooth extremum is quadratic in the position error,
    # so 1e-6 (b-a) lands far below the relative widening applied later
    best = _golden(g, lo, hi, signs, xtol=XTOL * (b - a))

    lo_ref = min(lo_sample, float(best[: idx_min.size].min()))
    hi_ref = max(hi_sample, float(-best[idx_min.size :].min()))
    refined = lo_ref < lo_sample or hi_ref > hi_sample
    return lo_ref, hi_ref, refined


def sign_change_roots(g, dg, grid, values, max_iter: int = 60, both=None):
    """Roots of ``g`` inside grid cells where ``values`` changes sign.

    Safeguarded Newton iteration (bisection whenever the step leaves the
    bracket or ``dg`` is ``None``), run on all brackets at once. ``both``,
    if given, returns ``(g(x), dg(x))`` in one call.
    """
    cells = np.flatnonzero(values[:-1] * values[1:] < 0)
    if cells.size == 0:
        return np.empty(0)
    lo, hi = grid[cells].copy(), grid[cells + 1].copy()
    g_lo = values[cells].copy()
    x = 0.5 * (lo + hi)
    tol = 4 * np.finfo(float).eps * (np.abs(grid[0]) + np.abs(grid[-1]) + 1)
    for _ in range(max_iter):
        if both is not None:
            gx, dgx = both(x)
            gx = np.asarray(gx, dtype=float)
        else:
            gx = np.asarray(g(x), dtype=float)
            dgx = dg(x) if dg is not None else None
        same = np.sign(gx) == np.sign(g_lo)
        lo = np.where(same, x, lo)
        g_lo = np.where(same, gx, g_lo)
        hi = np.where(same, hi, x)
        if dgx is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                step = x - gx / np.asarray(dgx, dtype=float)
            inside = np.isfinite(step) & (step > lo) & (step < hi)
            x_new = np.where(inside, step, 0.5 * (lo + hi))
        else:
            x_new = 0.5 * (lo + hi)
        moved = np.abs(x_new - x)
        x = x_new
        if np.all((moved <= tol) | (hi - lo <= tol) | (gx == 0)):
            break
    return x


def estimate_stats(f: Integrand, a: float, b: float, p: float = 2.0, rel_tol=None) -> DerivativeStats:
    """Derivative bounds and norms of ``f`` on ``[a, b]``.

    ``S`` comes from the endpoint values, ``gamma``/``Gamma`` from
    :func:`extremes` on ``f'`` (sampled on the uniform grid plus any
    breakpoints of ``f``), and the norms ``||f'||_2``, ``||f''||_2``,
    ``||f'||_1``, ``||f'||_p`` from one vector-valued :func:`integrate` call.
    The integration cells are split at the sign changes of ``f'`` so that
    ``|f'|`` is smooth on each of them. ``||f''||_2`` is ``None`` when ``f``
    has no second derivative.
    """
    a = float(a)
    b = float(b)
    fa, fb = float(f.value(a)), float(f.value(b))
    S = (fb - fa) / (b - a)

    grid = np.linspace(a, b, SAMPLES)
    inner = [bp for bp in f.breakpoints if a < bp < b]
    if inner:
        # derivative extremes of piecewise integrands sit on their breakpoints
        grid = np.union1d(grid, inner)
    d1_grid = np.asarray(f.d1(grid), dtype=float)
    if d1_grid.ndim == 0:
        d1_grid = np.full(grid.shape, float(d1_grid))
    gamma, Gamma, refined = extremes(f.d1, a, b, grid=grid, values=d1_grid)

    second = f.has_second
    roots = sign_change_roots(
        f.d1, f.d2 if second else None, grid, d1_grid, both=f.derivatives if second else None
    )
    extra_p = p != 2.0

    def norms_integrand(t):
        if second:
            d1, d2 = f.derivatives(t)
            d1 = np.broadcast_to(d1, t.shape)
            d2 = np.broadcast_to(d2, t.shape)
        else:
            d1 = np.broadcast_to(f.d1(t), t.shape)
        ad1 = np.abs(d1)
        rows = [d1 * d1, ad1]
        if second:
            rows.append(d2 * d2)
        if extra_p:
            rows.append(ad1**p)
        return np.vstack(rows)

    values, _ = integrate(norms_integrand, a, b, rel_tol, breakpoints=[*roots, *f.breakpoints])
    l2_sq, l1 = float(values[0]), float(values[1])
    l2_fsecond = math.sqrt(max(float(values[2]), 0.0)) if second else None
    l2 = math.sqrt(max(l2_sq, 0.0))
    lp = float(values[-1]) ** (1 / p) if extra_p else l2
    return DerivativeStats(
        a=a,
        b=b,
        gamma=gamma,
        Gamma=Gamma,
        S=S,
        l2_fprime=l2,
        l2_fsecond=l2_fsecond,
        l1_fprime=l1,
        p=p,
        lp_fprime=lp,
        refined=refined,
        extras={"l2_fprime_sq": l2_sq, "fprime_roots": roots},
    )
