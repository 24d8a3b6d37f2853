import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from companion_quad.errors import IntervalError
from companion_quad.kernel import (
    IntervalCtx,
    companion_average,
    companion_lhs,
    kernel_eval,
    kernel_l2_bracket,
    kernel_l2_sq,
    kernel_max_abs,
    kernel_mean,
)
from companion_quad.oracle.integrate import integrate


@st.composite
def contexts(draw):
    a = draw(st.floats(-5, 5))
    length = draw(st.floats(0.01, 10))
    s = draw(st.floats(0, 1))
    b = a + length
    x = a + s * ((a + b) / 2 - a)
    return IntervalCtx(a, b, min(x, (a + b) / 2))


def _exact_l2_sq(a, b, x):
    """Piecewise integral of K^2 in rationals."""
    a, b, x = Fraction(a), Fraction(b), Fraction(x)
    m, y = (a + b) / 2, a + b - x
    return ((x - a) ** 3 + ((y - m) ** 3 - (x - m) ** 3) + (b - y) ** 3) / 3


def test_context_validation():
    with pytest.raises(IntervalError):
        IntervalCtx(1.0, 1.0, 1.0)
    with pytest.raises(IntervalError):
        IntervalCtx(0.0, 1.0, 0.6)
    with pytest.raises(IntervalError):
        IntervalCtx(0.0, 1.0, -0.1)
    with pytest.raises(IntervalError):
        IntervalCtx(0.0, math.inf, 0.1)
    ctx = IntervalCtx(0, 1, 0.5)
    assert ctx.mirror == 0.5 and ctx.quarter_point == 0.25 and ctx.offset == 0.25
    assert ctx.with_x(0.0).x == 0.0


def test_kernel_branches():
    ctx = IntervalCtx(0.0, 4.0, 1.0)
    t = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0])
    want = [0.0, 0.5, 1.0, -0.5, 0.0, 1.0, -0.5, 0.0]
    np.testing.assert_array_equal(kernel_eval(ctx, t), want)
    assert kernel_eval(ctx, 1.0) == 1.0
    with pytest.raises(IntervalError):
        kernel_eval(ctx, 4.5)


def test_closed_forms_at_worked_context():
    ctx = IntervalCtx(0.0, 1.0, 0.25)
    assert kernel_max_abs(ctx) == 0.25
    assert kernel_l2_bracket(ctx) == 1 / 48
    assert kernel_l2_sq(ctx) == 1 / 48
    assert kernel_mean(ctx) == 0.0


@given(contexts())
def test_kernel_mean_is_exactly_zero(ctx):
    assert kernel_mean(ctx) == 0.0


@given(contexts())
def test_max_abs_matches_sampled_branch_ends(ctx):
    # |K| peaks at an end of one of the three linear pieces
    ends = np.array([ctx.a, ctx.x, ctx.mirror, ctx.b])
    left = [ctx.x - ctx.a, ctx.x - ctx.midpoint, ctx.mirror - ctx.midpoint, 0.0]
    right = [0.0, ctx.x - ctx.midpoint, ctx.mirror - ctx.b, ctx.a - ctx.b]
    sampled = max(np.max(np.abs(left)), np.max(np.abs(right[:3])), np.max(np.abs(kernel_eval(ctx, ends))))
    assert kernel_max_abs(ctx) == pytest.approx(sampled, rel=1e-12)
    grid = np.linspace(ctx.a, ctx.b, 2001)
    assert np.max(np.abs(kernel_eval(ctx, grid))) <= kernel_max_abs(ctx) * (1 + 1e-12)


@given(contexts())
def test_l2_square_matches_rational_integration(ctx):
    exact = _exact_l2_sq(ctx.a, ctx.b, ctx.x)
    assert kernel_l2_sq(ctx) == pytest.approx(float(exact), rel=1e-12, abs=1e-14)


def test_numeric_kernel_integrals_random_contexts():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = rng.uniform(-3, 3)
        b = a + rng.uniform(0.1, 5)
        ctx = IntervalCtx(a, b, rng.uniform(a, (a + b) / 2))
        bp = (ctx.x, ctx.mirror)
        (k1, k2), _ = integrate(lambda t: np.vstack([kernel_eval(ctx, t), kernel_eval(ctx, t) ** 2]), a, b, breakpoints=bp)
        assert abs(k1) <= 1e-10 * ctx.length**2
        assert abs(k2 - kernel_l2_sq(ctx)) <= 1e-10 * max(1.0, kernel_l2_sq(ctx))


@given(contexts())
def test_bracket_minimal_at_quarter_point(ctx):
    q = ctx.with_x(ctx.quarter_point)
    assert kernel_l2_bracket(q) <= kernel_l2_bracket(ctx) * (1 + 1e-15)
    assert kernel_max_abs(q) <= kernel_max_abs(ctx) * (1 + 1e-15)


def test_companion_average_and_lhs():
    ctx = IntervalCtx(0.0, 1.0, 0.25)
    f = lambda t: t * t
    assert companion_average(f, ctx) == 0.3125
    assert companion_lhs(f, ctx, 1 / 3) == pytest.approx(1 / 48, abs=1e-16)
    # linear functions are integrated exactly for every x
    for x in (0.0, 0.1, 0.5):
        assert companion_lhs(lambda t: 3 * t - 1, IntervalCtx(0, 1, x), 0.5) == pytest.approx(0.0, abs=1e-15)
