"""Second-order forward-mode differentiation of parsed expressions.

Each expression is parsed once and evaluated on a grid as a ``Jet2``,
which carries the value together with the first and second derivative.
"""

import numpy as np

from companion_quad import compile_expr, eval_jet, parse, unparse

e = parse("exp(-t^2/2) * sin(3*t)")
print("parsed:", unparse(e))

t = np.linspace(-1.0, 1.0, 5)
jet = eval_jet(e, t)
print("f   ", np.round(jet.value, 6))
print("f'  ", np.round(jet.d1, 6))
print("f'' ", np.round(jet.d2, 6))

# central differences as a sanity check on f'
h = 1e-6
fd = (eval_jet(e, t + h).value - eval_jet(e, t - h).value) / (2 * h)
print("max |f' - central difference| =", np.abs(fd - jet.d1).max())

# the compiled closure gives the same numbers as the tree walk, only faster
run = compile_expr(e, jet=True)
print("compiled matches tree walk:", np.array_equal(run(t).d2, jet.d2))

# precedence: unary minus binds looser than ^, and ^ is right associative
for src in ("-2^2", "2^3^2", "(-2)^2"):
    print(f"{src:>8} -> {float(eval_jet(parse(src), 0.0).value):g}")
