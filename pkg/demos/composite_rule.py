"""Composite rule: certified errors, convergence order and adaptivity.

Every cell is sampled at its 1/4 and 3/4 points. On a uniform grid the
error falls like 1/n^2 and the a priori remainders bound it from above.
"""

from companion_quad import ExpressionIntegrand, Partition, adaptive_partition, certify, convergence_study
from companion_quad import estimate_stats, integrate

f = ExpressionIntegrand("exp(t) * cos(2*t)")
a, b = 0.0, 2.0

print("  n   |error|     order   bound32    bound33")
for row in convergence_study(f, a, b, [1, 2, 4, 8, 16, 32]):
    order = f"{row.order:.3f}" if isinstance(row.order, float) else str(row.order)
    print(f"{row.n:3d}  {abs(row.true_error):.3e}  {order:>6}  {row.bound32:.3e}  {row.bound33:.3e}")

# a nonuniform partition only gets the slope remainder
stats = estimate_stats(f, a, b).widened()
ref, _ = integrate(f, a, b)
res = certify(f, Partition.from_interior(a, b, [0.3, 0.9, 1.6]), stats, ref)
print(f"\nnonuniform: |error| {abs(res.true_error):.3e} <= {res.bound_31_gamma:.3e}")

# adaptive refinement spends cells where f'' is large
g = ExpressionIntegrand("exp(4*t)")
P, res = adaptive_partition(g, 0.0, 1.0, 1e-4, reference=True)
print(f"\nadaptive exp(4t): {P.n} cells, certified {res.certified_bound:.2e}, actual {abs(res.true_error):.2e}")
print("first and last widths:", round(float(P.widths[0]), 4), round(float(P.widths[-1]), 4))
