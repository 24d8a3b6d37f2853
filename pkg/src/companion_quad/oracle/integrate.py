"""Reference integration: adaptive bisection over a 10-point Gauss-Legendre rule.

Each cell is integrated whole and as two halves; the difference is the cell's
error estimate. Cells are processed one bisection level at a time, with all
their nodes evaluated in a single vectorised call, which is what makes the
verification corpus affordable.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import IntegrationError
from .integrands import Integrand

__all__ = ["integrate", "default_rel_tol", "RTOL_ENV_VAR", "GL_ORDER"]

RTOL_ENV_VAR = "COMPANION_QUAD_RTOL"
GL_ORDER = 10
MIN_REL_TOL = 1e-13
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
_EPS = np.finfo(float).eps


def default_rel_tol() -> float:
    """Oracle tolerance, overridable through ``COMPANION_QUAD_RTOL``."""
    raw = os.environ.get(RTOL_ENV_VAR)
    if raw:
        value = float(raw)
        if not value >= MIN_REL_TOL:
            raise ValueError(f"{RTOL_ENV_VAR}={raw} is below {MIN_REL_TOL}")
        return value
    return 1e-12


def _rule(g, lo, hi):
    centre = 0.5 * (lo + hi)
    radius = 0.5 * (hi - lo)
    nodes = centre[:, None] + radius[:, None] * _NODES[None, :]
    vals = np.asarray(g(nodes.ravel()), dtype=float)
    vector = vals.ndim == 2
    if not vector:
        vals = np.broadcast_to(vals, (1, nodes.size))
    vals = vals.reshape(vals.shape[0], lo.size, GL_ORDER)
    q = (vals @ _WEIGHTS) * radius
    qa = (np.abs(vals) @ _WEIGHTS) * radius
    return q, qa, vector


def integrate(
    f,
    a: float,
    b: float,
    rel_tol: float | None = None,
    *,
    abs_tol: float = 1e-14,
    breakpoints=(),
    max_depth: int = 60,
):
    """Integrate ``f`` over ``[a, b]``; returns ``(value, err_est)``.

    ``f`` is an :class:`Integrand` or any vectorised callable. A callable may
    return shape ``(k, n)`` for ``n`` points, in which case ``k`` integrals
    are computed together and both outputs are arrays of length ``k``.

    The accuracy target is ``max(rel_tol * int|f|, abs_tol)``, shared among
    cells in proportion to their width. Initial cells start at ``breakpoints``
    (and at ``f.breakpoints`` for integrands) so that kinks sit on cell edges.

    Raises
    ------
    IntegrationError
        If some cell is still unresolved after ``max_depth`` bisections.
    """
    if rel_tol is None:
        rel_tol = default_rel_tol()
    if not rel_tol >= MIN_REL_TOL:
        raise ValueError(f"rel_tol must be >= {MIN_REL_TOL}, got {rel_tol}")
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")

    points = set(breakpoints)
    if isinstance(f, Integrand):
        points.update(f.breakpoints)
        g = f.value
    else:
        g = f
    interior = sorted(float(p) for p in points if a < p < b)
    edges = np.array([a, *interior, b])

    lo, hi = edges[:-1], edges[1:]
    q, qa, vector = _rule(g, lo, hi)
    n_out = q.shape[0]
    scale = qa.sum(axis=1)
    target = np.maximum(rel_tol * scale, abs_tol)[:, None]
    total = np.zeros(n_out)
    err_total = np.zeros(n_out)
    length = b - a

    depth = 0
    while lo.size:
        if depth >= max_depth:
            raise IntegrationError(
                f"no convergence after {max_depth} bisections near t={lo[0]:.17g}"
            )
        mid = 0.5 * (lo + hi)
        halves, halves_abs, _ = _rule(g, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        n = lo.size
        left, right = halves[:, :n], halves[:, n:]
        fine = left + right
        err = np.abs(fine - q)
        noise = 64 * _EPS * (halves_abs[:, :n] + halves_abs[:, n:])
        allowed = target * ((hi - lo) / length)
        done = np.all((err <= allowed) | (err <= noise), axis=0)

        total += fine[:, done].sum(axis=1)
        err_total += err[:, done].sum(axis=1)

        keep = ~done
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        q = np.concatenate([left[:, keep], right[:, keep]], axis=1)
        depth += 1

    if vector:
        return total, err_total
    return float(total[0]), float(err_total[0])
