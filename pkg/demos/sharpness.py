"""How close the slope bound comes to equality.

A piecewise quadratic witness with slope rising from 0 to 1 in a window of
width epsilon just left of x makes the gap approach the bound as epsilon
shrinks; the ratio follows 1 - (eps + eps^2) / (2x).
"""

from companion_quad.oracle import predicted_ratio, sharpness_row

for x in (0.25, 0.5):
    print(f"x = {x}")
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        row = sharpness_row(eps, x)
        print(f"  eps={eps:7.0e}  lhs={row.lhs:.3e}  rhs={row.rhs:.3e}  "
              f"ratio={row.ratio:.6f}  predicted={predicted_ratio(eps, x):.6f}")
