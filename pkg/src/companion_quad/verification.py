"""Corpus soundness run: every implemented inequality against the oracle.

Each trial takes corpus entry ``i`` (an integrand and an interval context)
and the density drawn for the same interval, and checks

* every pointwise bound in :func:`~companion_quad.bounds.best_bound`,
* the kernel identity ``(1/(b-a)) int K f' = (f(x)+f(a+b-x))/2 - mean``,
* the composite remainder bounds for ``n`` in 1, 2, 4, ..., 64,
* the four density bounds.

A check fails when ``lhs > rhs + tol * (1 + |rhs|)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .bounds import best_bound
from .kernel import IntervalCtx, companion_average, kernel_eval
from .oracle.corpus import corpus_entry, density_entry
from .oracle.integrate import integrate
from .oracle.stats import estimate_stats
from .probability import DensityCtx, all_prob_bounds
from .quadrature import Partition, certify

__all__ = ["BOUND_TOL", "IDENTITY_TOL", "COMPOSITE_NS", "TrialOutcome", "VerifyReport", "run_trial", "verify"]

BOUND_TOL = 1e-7
IDENTITY_TOL = 1e-8
COMPOSITE_NS = (1, 2, 4, 8, 16, 32, 64)


@dataclass
class TrialOutcome:
    index: int
    checks: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def check(self, name: str, lhs: float, rhs: float, tol: float, **detail):
        self.checks[name] += 1
        if not lhs <= rhs + tol:
            self.violations.append({"index": self.index, "check": name, "lhs": lhs, "rhs": rhs, **detail})


@dataclass
class VerifyReport:
    seed: int
    trials: int
    checks: Counter
    violations: list
    errors: list

    @property
    def total_checks(self) -> int:
        return sum(self.checks.values())

    @property
    def ok(self) -> bool:
        return not self.violations and not self.errors

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks_run": self.total_checks,
            "checks_by_inequality": dict(sorted(self.checks.items())),
            "violations": len(self.violations),
            "errors": len(self.errors),
            "violation_records": self.violations,
            "error_records": self.errors,
        }


def _slack(rhs: float) -> float:
    return BOUND_TOL * (1 + abs(rhs))


def _pointwise(out: TrialOutcome, f, ctx: IntervalCtx, stats, detail):
    a, b = ctx.a, ctx.b

    def rows(t):
        jet = f.jet(t)
        return np.vstack([np.broadcast_to(jet.value, t.shape), kernel_eval(ctx, t) * jet.d1])

    (integral, kernel_inner), _ = integrate(rows, a, b, breakpoints=(ctx.x, ctx.mirror))
    mean = integral / ctx.length
    report = best_bound(f, ctx, stats, mean)
    for entry in report.applicable():
        out.check(entry.bound_id, report.lhs, entry.rhs, _slack(entry.rhs), **detail)

    residual = abs(kernel_inner / ctx.length - (companion_average(f, ctx) - mean))
    out.check("kernel_identity", residual, 0.0, IDENTITY_TOL, **detail)
    return integral


def _composite(out: TrialOutcome, f, ctx: IntervalCtx, stats, integral, detail):
    for n in COMPOSITE_NS:
        res = certify(f, Partition.uniform(ctx.a, ctx.b, n), stats, reference=integral)
        err = abs(res.true_error)
        for name, rhs in (
            ("th31g", res.bound_31_gamma),
            ("th31G", res.bound_31_Gamma),
            ("th32", res.bound_32),
            ("th33", res.bound_33),
        ):
            if rhs is not None:
                out.check(name, err, rhs, _slack(rhs), n=n, **detail)


def _density(out: TrialOutcome, seed: int, index: int, ctx: IntervalCtx):
    pdf = density_entry(seed, index, ctx.a, ctx.b)
    detail = {"pdf": pdf.label, "a": ctx.a, "b": ctx.b, "x": ctx.x}
    d = DensityCtx.from_pdf(pdf, ctx.a, ctx.b)
    values = all_prob_bounds(d, ctx)
    lhs = values["lhs"]
    for name in ("th41g", "th41G", "th42", "th43"):
        rhs = values[name]
        if rhs is not None:
            out.check(name, lhs, rhs, _slack(rhs), **detail)


def run_trial(seed: int, index: int) -> TrialOutcome:
    """All checks for corpus entry ``index``; exceptions are recorded, not raised."""
    out = TrialOutcome(index)
    f, ctx = corpus_entry(seed, index)
    detail = {"f": f.label, "a": ctx.a, "b": ctx.b, "x": ctx.x}
    try:
        stats = estimate_stats(f, ctx.a, ctx.b).widened()
        integral = _pointwise(out, f, ctx, stats, detail)
        _composite(out, f, ctx, stats, integral, detail)
        _density(out, seed, index, ctx)
    except Exception as exc:  # recorded so one bad entry cannot hide the others
        out.errors.append({"index": index, "error": f"{type(exc).__name__}: {exc}", **detail})
    return out


def _run_star(args):
    return run_trial(*args)


def verify(seed: int, trials: int, parallel: int = 1) -> VerifyReport:
    """Run ``trials`` corpus entries, on ``parallel`` worker processes if > 1.

    Results are merged in index order, so the report does not depend on the
    number of workers.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(seed, i) for i in range(trials)]
    if parallel > 1:
        import multiprocessing

        with multiprocessing.Pool(parallel) as pool:
            outcomes = pool.map(_run_star, jobs, chunksize=max(1, math.ceil(trials / (4 * parallel))))
    else:
        outcomes = [_run_star(job) for job in jobs]

    checks: Counter = Counter()
    violations, errors = [], []
    for outcome in outcomes:
        checks.update(outcome.checks)
        violations.extend(outcome.violations)
        errors.extend(outcome.errors)
    return VerifyReport(seed, trials, checks, violations, errors)
