"""Bounds for the distribution function of a density on [a, b].

Applying the pointwise bounds to the CDF relates (F(x) + F(a + b - x)) / 2
to (b - E[X]) / (b - a), with the density playing the role of f'.
"""

from companion_quad import DensityCtx, IntervalCtx, all_prob_bounds

for pdf, (a, b) in [("2*t", (0.0, 1.0)), ("6*t*(1 - t)", (0.0, 1.0)), ("exp(-t)", (0.0, 3.0))]:
    d = DensityCtx.from_pdf(pdf, a, b)
    x = a + (b - a) / 4
    values = all_prob_bounds(d, IntervalCtx(a, b, x))
    note = " (normalized)" if d.normalized else ""
    print(f"{pdf}{note} on [{a}, {b}], E[X] = {values['expectation']:.6f}")
    for key in ("lhs", "th41g", "th41G", "th42", "th43"):
        print(f"  {key:<6} {values[key]:.6f}")
