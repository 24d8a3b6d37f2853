"""Composite companion rule with a-priori remainder bounds.

Each cell ``[x_i, x_{i+1}]`` is sampled at its quarter points::

    S(f, P) = 1/2 * sum_i [f((3x_i + x_{i+1})/4) + f((x_i + 3x_{i+1})/4)] * h_i

The remainder ``R = int f - S`` is bounded by a slope form valid on any
partition and by two L2 forms that assume a uniform partition.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import DerivativeStats, clamp_sigma
from .errors import BoundInputError, IntervalError
from . import kernel
from .oracle.integrate import integrate
from .oracle.stats import estimate_stats

__all__ = [
    "Partition",
    "QuadratureResult",
    "ConvergenceRow",
    "composite_rule",
    "cell_slopes",
    "remainder_th31",
    "remainder_th32",
    "remainder_th33",
    "certify",
    "convergence_study",
    "convergence_csv",
    "CSV_HEADER",
    "adaptive_partition",
    "MAX_CELLS",
]

CSV_HEADER = ("n", "estimate", "true_error", "bound31g", "bound31G", "bound32", "bound33", "order")
MAX_CELLS = 2**20
_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """Strictly increasing breakpoints ``a = x_0 < ... < x_n = b``."""

    points: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise IntervalError("a partition needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise IntervalError("partition points must be finite")
        if not np.all(np.diff(pts) > 0):
            raise IntervalError("partition points must be strictly increasing")
        object.__setattr__(self, "points", tuple(float(p) for p in pts))

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Partition":
        if n < 1:
            raise IntervalError(f"need n >= 1, got {n}")
        pts = np.linspace(a, b, n + 1)
        pts[0], pts[-1] = a, b
        return cls(tuple(pts))

    @classmethod
    def from_interior(cls, a: float, b: float, interior=()) -> "Partition":
        return cls((a, *sorted(interior), b))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points)

    @property
    def a(self) -> float:
        return self.points[0]

    @property
    def b(self) -> float:
        return self.points[-1]

    @property
    def n(self) -> int:
        return len(self.points) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.array)

    @property
    def is_uniform(self) -> bool:
        h = (self.b - self.a) / self.n
        return bool(np.all(np.abs(self.widths - h) <= _UNIFORM_RTOL * h))


@dataclass
class QuadratureResult:
    estimate: float
    n: int
    bound_31_gamma: Optional[float] = None
    bound_31_Gamma: Optional[float] = None
    bound_32: Optional[float] = None
    bound_33: Optional[float] = None
    certified_bound: Optional[float] = None
    true_error: Optional[float] = None
    reference: Optional[float] = None
    notes: list = field(default_factory=list)

    def populated_bounds(self) -> dict:
        names = ("bound_31_gamma", "bound_31_Gamma", "bound_32", "bound_33", "certified_bound")
        return {k: getattr(self, k) for k in names if getattr(self, k) is not None}

    @property
    def best_bound(self) -> Optional[float]:
        values = self.populated_bounds().values()
        return min(values) if values else None

    def violations(self, tol: float = 1e-9, scale: float = 1.0) -> list:
        """Names of populated bounds exceeded by ``|true_error|``."""
        if self.true_error is None:
            return []
        err = abs(self.true_error)
        return [k for k, v in self.populated_bounds().items() if err > v + tol * scale]

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "n": self.n,
            "bound31g": self.bound_31_gamma,
            "bound31G": self.bound_31_Gamma,
            "bound32": self.bound_32,
            "bound33": self.bound_33,
            "certified_bound": self.certified_bound,
            "true_error": self.true_error,
            "reference": self.reference,
        }


def _quarter_nodes(P: Partition):
    x = P.array
    return (3 * x[:-1] + x[1:]) / 4, (x[:-1] + 3 * x[1:]) / 4


def composite_rule(f, P: Partition) -> float:
    """``S(f, P)``, summed with compensated (``math.fsum``) summation."""
    left, right = _quarter_nodes(P)
    vals = np.asarray(f(np.concatenate([left, right])), dtype=float)
    vals = np.broadcast_to(vals, (2 * P.n,))
    cells = 0.5 * (vals[: P.n] + vals[P.n :]) * P.widths
    return math.fsum(cells)


def cell_slopes(f, P: Partition) -> np.ndarray:
    """Secant slopes ``S_i = (f(x_{i+1}) - f(x_i)) / h_i``."""
    vals = np.broadcast_to(np.asarray(f(P.array), dtype=float), (P.n + 1,))
    return np.diff(vals) / P.widths


def remainder_th31(f, P: Partition, gamma: float, Gamma: float) -> tuple[float, float]:
    """``(1/4) sum (S_i - gamma) h_i^2`` and ``(1/4) sum (Gamma - S_i) h_i^2``.

    Valid on any partition when ``gamma <= f' <= Gamma`` on ``[a, b]``.
    """
    vals = np.broadcast_to(np.asarray(f(P.array), dtype=float), (P.n + 1,))
    h = P.widths
    S = np.diff(vals) / h
    h2 = h**2
    # on very narrow cells the secant slope is dominated by cancellation
    rounding = 4 * np.finfo(float).eps * (np.abs(vals[:-1]) + np.abs(vals[1:])) / h
    tol = 1e-12 * (1 + np.abs(S)) + rounding
    if np.any(S < gamma - tol) or np.any(S > Gamma + tol):
        raise BoundInputError("a cell slope lies outside [gamma, Gamma]; derivative bounds are wrong")
    lower = math.fsum(np.maximum(S - gamma, 0.0) * h2) / 4
    upper = math.fsum(np.maximum(Gamma - S, 0.0) * h2) / 4
    return lower, upper


def remainder_th32(a: float, b: float, n: int, l2_fsecond: float) -> float:
    """``(b-a)^(5/2) / (4 sqrt(3) pi n^2) * ||f''||_2`` for the uniform ``n``-cell rule."""
    if n < 1:
        raise IntervalError(f"need n >= 1, got {n}")
    return (b - a) ** 2.5 * math.sqrt(kernel.KERNEL_L2_CONSTANT) / (math.pi * n * n) * l2_fsecond


def remainder_th33(a: float, b: float, n: int, sigma_fprime: float, scale: float = 1.0) -> float:
    """``(b-a)^(3/2) / (4 sqrt(3) n) * sqrt(sigma(f'))`` for the uniform ``n``-cell rule."""
    if n < 1:
        raise IntervalError(f"need n >= 1, got {n}")
    sigma = clamp_sigma(sigma_fprime, scale)
    return (b - a) ** 1.5 * math.sqrt(kernel.KERNEL_L2_CONSTANT) / n * math.sqrt(sigma)


def certify(f, P: Partition, stats: DerivativeStats, reference: Optional[float] = None) -> QuadratureResult:
    """Estimate plus every bound whose hypotheses ``P`` meets.

    The L2 bounds are left empty on a non-uniform partition rather than
    extrapolated beyond their uniform-grid hypothesis.
    """
    result = QuadratureResult(estimate=composite_rule(f, P), n=P.n)
    result.bound_31_gamma, result.bound_31_Gamma = remainder_th31(f, P, stats.gamma, stats.Gamma)
    if P.is_uniform:
        if stats.l2_fsecond is not None:
            result.bound_32 = remainder_th32(P.a, P.b, P.n, stats.l2_fsecond)
        if stats.l2_fprime is not None:
            result.bound_33 = remainder_th33(P.a, P.b, P.n, stats.sigma_fprime, stats.l2_fprime**2)
    else:
        result.notes.append("non-uniform partition: L2 bounds not applicable")
    if reference is not None:
        result.reference = reference
        result.true_error = reference - result.estimate
    return result


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    estimate: float
    true_error: float
    bound31g: float
    bound31G: float
    bound32: Optional[float]
    bound33: Optional[float]
    order: "float | str | None"

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_HEADER}


def convergence_study(f, a: float, b: float, n_list, stats=None, rel_tol=None) -> list:
    """Error and bounds on uniform partitions for each ``n`` in ``n_list``.

    The order column compares consecutive rows,
    ``log(e_n / e_m) / log(m / n)``; it reads ``"exact"`` when both errors
    are at roundoff level and ``None`` on the last row.
    """
    n_list = [int(n) for n in n_list]
    if any(n < 1 for n in n_list) or n_list != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise ValueError("n_list must be strictly ascending positive integers")
    if stats is None:
        stats = estimate_stats(f, a, b, rel_tol=rel_tol)
    stats = stats.widened()
    reference, _ = integrate(f, a, b, rel_tol)
    floor = 1e-13 * max(1.0, abs(reference))

    results = [certify(f, Partition.uniform(a, b, n), stats, reference) for n in n_list]
    rows = []
    for k, (n, res) in enumerate(zip(n_list, results)):
        order = None
        if k + 1 < len(results):
            e0, e1 = abs(res.true_error), abs(results[k + 1].true_error)
            if e0 <= floor and e1 <= floor:
                order = "exact"
            elif e0 > 0 and e1 > 0:
                order = math.log(e0 / e1) / math.log(n_list[k + 1] / n)
        rows.append(
            ConvergenceRow(
                n=n,
                estimate=res.estimate,
                true_error=res.true_error,
                bound31g=res.bound_31_gamma,
                bound31G=res.bound_31_Gamma,
                bound32=res.bound_32,
                bound33=res.bound_33,
                order=order,
            )
        )
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def convergence_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(getattr(row, name)) for name in CSV_HEADER])
    return buf.getvalue()


def _local_l2_bound_factory(f, rel_tol):
    cache = {}

    def local(lo: float, hi: float) -> float:
        key = (lo, hi)
        if key not in cache:
            value, err = integrate(lambda t: np.asarray(f.d2(t), dtype=float) ** 2, lo, hi, rel_tol)
            # integration error enters on the safe side
            norm = math.sqrt(max(value, 0.0) + err)
            h = hi - lo
            cache[key] = h**2.5 * math.sqrt(kernel.KERNEL_L2_CONSTANT) / math.pi * norm
        return cache[key]

    return local, cache


def adaptive_partition(f, a: float, b: float, target: float, rel_tol: float = 1e-10, reference: bool = False):
    """Greedy bisection until the summed per-cell ``f''`` bounds reach ``target``.

    Each cell carries the certified bound
    ``h^(5/2) / (4 sqrt(3) pi) * ||f''||_{2, cell}`` on its integration error;
    the cell with the largest bound is bisected until the sum is at most
    ``target``. Per-cell norms are cached across rounds.

    Returns ``(partition, result)`` with ``result.certified_bound`` set to the
    final sum; with ``reference=True`` the oracle's true error is attached.
    """
    if not target > 0:
        raise ValueError("target must be positive")
    if not getattr(f, "has_second", False):
        raise BoundInputError("adaptive refinement needs the second derivative")
    local, _ = _local_l2_bound_factory(f, rel_tol)

    first = local(a, b)
    heap = [(-first, a, b)]
    total = first
    while total > target:
        if len(heap) >= MAX_CELLS:
            raise BoundInputError(f"target {target} not reached with {MAX_CELLS} cells")
        neg, lo, hi = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise BoundInputError("cells cannot be bisected further; target unreachable")
        left, right = local(lo, mid), local(mid, hi)
        heapq.heappush(heap, (-left, lo, mid))
        heapq.heappush(heap, (-right, mid, hi))
        total += left + right + neg
        if total <= target:
            total = math.fsum(-item[0] for item in heap)

    points = sorted({a, b, *(item[1] for item in heap)})
    P = Partition(tuple(points))
    certified = math.fsum(-item[0] for item in heap)
    result = QuadratureResult(estimate=composite_rule(f, P), n=P.n, certified_bound=certified)
    if reference:
        ref, _ = integrate(f, a, b, None)
        result.reference = ref
        result.true_error = ref - result.estimate
    return P, result
