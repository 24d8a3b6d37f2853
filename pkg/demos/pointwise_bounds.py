"""Pointwise bounds for the two-point average at x and a + b - x.

For f(t) = t^2 on [0, 1] the average at x = 1/4 misses the mean by 1/48.
The script prints every bound next to that gap, then sweeps x to show how
the kernel-based bounds shrink toward the quarter point.
"""

import numpy as np

from companion_quad import ExpressionIntegrand, IntervalCtx, best_bound, estimate_stats, integrate

f = ExpressionIntegrand("t^2")
a, b = 0.0, 1.0
stats = estimate_stats(f, a, b)
mean, _ = integrate(f, a, b)

report = best_bound(f, IntervalCtx(a, b, 0.25), stats, mean)
print(f"lhs = {report.lhs:.6f}  (1/48 = {1 / 48:.6f})")
for entry in report.entries:
    print(f"  {entry.bound_id:<13} {entry.rhs:.6f}")
print("tightest:", report.tightest)

print("\n   x      lhs      th22      th23")
for x in np.linspace(0.0, 0.5, 6):
    r = best_bound(f, IntervalCtx(a, b, x), stats, mean)
    print(f"{x:5.2f}  {r.lhs:.5f}  {r.rhs('th22'):.5f}  {r.rhs('th23'):.5f}")

# a less friendly integrand, with f' changing sign
g = ExpressionIntegrand("sin(4*t) + t/2")
stats = estimate_stats(g, -1.0, 2.0)
mean, _ = integrate(g, -1.0, 2.0)
r = best_bound(g, IntervalCtx(-1.0, 2.0, -0.2), stats, mean)
print(f"\nsin(4t) + t/2 on [-1, 2], x = -0.2: lhs {r.lhs:.5f}, best {r.tightest} = {r.rhs(r.tightest):.5f}")
