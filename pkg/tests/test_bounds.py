import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from companion_quad.bounds import (
    BOUND_IDS,
    DerivativeStats,
    best_bound,
    bound_alomari,
    bound_dragomir,
    bound_th21,
    bound_th22,
    bound_th23,
    clamp_sigma,
)
from companion_quad.errors import BoundInputError
from companion_quad.kernel import IntervalCtx, kernel_eval
from companion_quad.oracle import ExpressionIntegrand, estimate_stats, integrate
from companion_quad.oracle.corpus import corpus_entry

# t^2 on [0, 1]: f' = 2t, f'' = 2
SQUARE_STATS = DerivativeStats(
    a=0.0, b=1.0, gamma=0.0, Gamma=2.0, S=1.0,
    l2_fprime=math.sqrt(4 / 3), l2_fsecond=2.0, l1_fprime=1.0, p=2.0, lp_fprime=math.sqrt(4 / 3),
)
WORKED = IntervalCtx(0.0, 1.0, 0.25)


def test_worked_case_closed_form():
    assert bound_th21(WORKED, SQUARE_STATS) == (0.25, 0.25)
    assert bound_th22(WORKED, SQUARE_STATS) == pytest.approx(1 / (2 * math.sqrt(3) * math.pi), abs=1e-15)
    assert bound_th23(WORKED, SQUARE_STATS) == pytest.approx(1 / 12, abs=1e-15)
    assert bound_alomari(WORKED, SQUARE_STATS) == 0.125
    inf, p, one = bound_dragomir(WORKED, SQUARE_STATS, 2.0)
    assert inf == 0.25 and one == 0.25
    assert p == pytest.approx(1 / 6, abs=1e-15)


def test_best_bound_report():
    f = ExpressionIntegrand("t^2")
    report = best_bound(f, WORKED, SQUARE_STATS, 1 / 3)
    assert report.lhs == pytest.approx(1 / 48, abs=1e-15)
    assert [e.bound_id for e in report.entries] == list(BOUND_IDS)
    assert report.tightest == "th23"
    assert report.violations() == []
    assert report.rhs("alomari") == 0.125
    with pytest.raises(KeyError):
        report.rhs("nope")


def test_tie_break_follows_id_order():
    # a linear function zeroes every companion-family bound
    f = ExpressionIntegrand("3*t + 1")
    stats = DerivativeStats(0.0, 1.0, 3.0, 3.0, 3.0, l2_fprime=3.0, l2_fsecond=0.0, l1_fprime=3.0, lp_fprime=3.0)
    report = best_bound(f, IntervalCtx(0, 1, 0.3), stats, 2.5)
    assert report.tightest == "th23"
    stats = DerivativeStats(0.0, 1.0, 3.0, 3.0, 3.0)
    report = best_bound(f, IntervalCtx(0, 1, 0.3), stats, 2.5)
    assert report.tightest == "th21g"
    assert not any(e.applicable for e in report.entries if e.bound_id in ("th23", "th22", "dragomir_p", "dragomir_1"))


def test_slope_order_is_enforced():
    bad = DerivativeStats(0.0, 1.0, gamma=1.5, Gamma=2.0, S=1.0)
    with pytest.raises(BoundInputError):
        bound_th21(WORKED, bad)
    with pytest.raises(BoundInputError):
        bound_th22(WORKED, bad)  # no second-derivative norm


def test_sigma_clamp():
    assert clamp_sigma(0.5) == 0.5
    assert clamp_sigma(-1e-13) == 0.0
    assert clamp_sigma(-1e-10, scale=1e3) == 0.0
    with pytest.raises(BoundInputError):
        clamp_sigma(-1e-6)


def test_widening_moves_outward():
    w = SQUARE_STATS.widened()
    assert w.gamma < 0.0 < 2.0 < w.Gamma
    assert w.S == SQUARE_STATS.S
    assert SQUARE_STATS.sigma_fprime == pytest.approx(1 / 3)


def test_dragomir_forms_match_kernel_norms():
    # each baseline is ||K||_q / (b-a) times the dual norm of f'
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = rng.uniform(-2, 2)
        b = a + rng.uniform(0.5, 3)
        ctx = IntervalCtx(a, b, rng.uniform(a, (a + b) / 2))
        p = rng.uniform(1.2, 4.0)
        q = p / (p - 1)
        stats = DerivativeStats(a, b, -1.0, 2.0, 0.5, l2_fprime=1.0, l1_fprime=0.7, p=p, lp_fprime=1.3)
        bp = (ctx.x, ctx.mirror)
        (k1, kq), _ = integrate(
            lambda t: np.vstack([np.abs(kernel_eval(ctx, t)), np.abs(kernel_eval(ctx, t)) ** q]), a, b, breakpoints=bp
        )
        t = np.linspace(a, b, 20001)
        kmax = np.max(np.abs(kernel_eval(ctx, np.concatenate([t, [ctx.x, ctx.mirror]]))))
        inf, rp, one = bound_dragomir(ctx, stats, p)
        L = b - a
        assert inf == pytest.approx(k1 / L * 2.0, rel=1e-10)
        assert rp == pytest.approx(kq ** (1 / q) / L * 1.3, rel=1e-10)
        assert one == pytest.approx(kmax / L * 0.7, rel=1e-10)


def test_dragomir_requires_p_above_one():
    with pytest.raises(BoundInputError):
        bound_dragomir(WORKED, SQUARE_STATS, 1.0)
    _, rp, _ = bound_dragomir(WORKED, SQUARE_STATS, 3.0)
    assert rp is None  # stats hold the p = 2 norm only


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 1))
def test_every_bound_holds_on_corpus_entries(index, s):
    f, ctx = corpus_entry(2024, index)
    ctx = ctx.with_x(ctx.a + s * (ctx.midpoint - ctx.a))
    stats = estimate_stats(f, ctx.a, ctx.b).widened()
    mean = integrate(f, ctx.a, ctx.b)[0] / ctx.length
    report = best_bound(f, ctx, stats, mean)
    assert report.violations(1e-7) == []


@given(st.floats(-3, 3), st.floats(0.1, 5))
def test_quarter_point_halves_endpoint_bounds(a, length):
    b = a + length
    stats = DerivativeStats(a, b, -1.0, 3.0, 0.5, l2_fprime=2.0, l2_fsecond=1.5)
    end, quarter = IntervalCtx(a, b, a), IntervalCtx(a, b, (3 * a + b) / 4)
    for bound in (lambda c: bound_th21(c, stats)[0], lambda c: bound_th21(c, stats)[1],
                  lambda c: bound_th22(c, stats), lambda c: bound_th23(c, stats)):
        assert bound(quarter) == pytest.approx(bound(end) / 2, rel=1e-14)
