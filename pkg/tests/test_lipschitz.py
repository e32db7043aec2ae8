import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normbound.errors import BudgetError, DomainError
from normbound.lipschitz import (
    DiscreteVariable,
    analyze,
    banach_scales,
    concentration_tail,
    exact_xi_analysis,
    profile_radius,
    rho_second_moment_bound,
)
from normbound.tail_bounds import pinelis_bound

PM = DiscreteVariable((-1, 1), (0.5, 0.5))
BIT = DiscreteVariable((0, 1), (0.5, 0.5))


def test_profile_radius():
    p = profile_radius([2, 2])
    assert p.radii == (1.0, 1.0) and p.radius == pytest.approx(math.sqrt(2), rel=1e-15)
    assert profile_radius([2]).radius == 1.0
    d, n = 0.7, 9
    assert profile_radius([d] * n).radius == pytest.approx(d * math.sqrt(n) / 2, rel=1e-14)
    with pytest.raises(DomainError):
        profile_radius([1, -1])
    with pytest.raises(DomainError):
        profile_radius([])


def test_concentration_tail():
    assert concentration_tail(1.0, 0.0).plain == 1.0
    r = 1.7
    t = concentration_tail(r, 3 * r)
    assert t.plain == pytest.approx(0.0076932, abs=5e-7)
    assert t.plain == pytest.approx(pinelis_bound(3.0, 1.0), rel=1e-14)
    t = concentration_tail(r, 2.5 * r)
    assert t.tighter <= t.plain
    with pytest.raises(DomainError):
        concentration_tail(0.0, 1.0)


def test_xi_linear():
    for i in range(3):
        a = exact_xi_analysis("sum", [PM] * 3, i)
        assert (a.d_sup, a.second_moment_sup, a.s_i, a.r_hat) == (1.0, 1.0, 1.0, 1.0)


def test_xi_abs_sum_r_hat():
    # the last coordinate of |x_0 + x_1| moves E[g | prefix] by 2 at most
    a = exact_xi_analysis("abs-sum", [PM, PM], 1)
    assert a.r_hat == 1.0
    # by hand: E|x_0 + X_1| = 1 for either x_0, so the first step carries no information
    assert exact_xi_analysis("abs-sum", [PM, PM], 0).r_hat == 0.0


def test_xi_max_bits():
    for i in range(2):
        a = exact_xi_analysis("max", [BIT, BIT], i)
        assert a.r_hat <= a.r_i == 0.5


def test_callable_g_matches_builtin():
    f = lambda pt: abs(sum(float(np.sum(p)) for p in pt))
    vs = [DiscreteVariable((-1, 0, 2), (0.3, 0.3, 0.4))] * 3
    for i in range(3):
        assert exact_xi_analysis(f, vs, i) == exact_xi_analysis("abs-sum", vs, i)


def test_rho_second_moment_bound():
    absdiff = lambda a, b: abs(a - b)
    assert rho_second_moment_bound(absdiff, PM) == 2.0
    assert rho_second_moment_bound(lambda a, b: 0.0, PM) == 0.0
    v = DiscreteVariable((-1, 0, 3), (0.5, 0.25, 0.25))
    a = exact_xi_analysis("sum", [v, v], 1)
    assert a.second_moment_sup <= rho_second_moment_bound(absdiff, v) + 1e-12


def test_banach_scales():
    assert banach_scales([1], [1]).aggregate == 1.0
    s = banach_scales([2, 2], [1, 1])
    assert list(s.entries) == [1.25, 1.25]
    assert s.aggregate == pytest.approx(1.25 * math.sqrt(2), rel=1e-15)
    with pytest.raises(DomainError):
        banach_scales([1], [1, 1])
    with pytest.raises(DomainError):
        banach_scales([0], [1])


@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=6), st.data())
def test_banach_scale_below_d(d, data):
    m = [data.draw(st.floats(0, x * x)) for x in d]
    s = banach_scales(d, m)
    assert all(si <= di * (1 + 1e-15) for si, di in zip(s.entries, d))


def test_variable_validation():
    with pytest.raises(DomainError):
        DiscreteVariable((0, 0), (0.5, 0.5))
    with pytest.raises(DomainError):
        DiscreteVariable((0, 1), (0.5, 0.6))
    with pytest.raises(DomainError):
        DiscreteVariable(("a",), (1.0,)).embedding()
    assert DiscreteVariable(("a", "b"), (0.5, 0.5), {"a": [1, 0], "b": [0, 1]}).embedding().shape == (2, 2)


def test_budget():
    with pytest.raises(BudgetError):
        exact_xi_analysis("sum", [DiscreteVariable((0, 1, 2), (0.2, 0.3, 0.5))] * 13, 0)


def test_zero_probability_points_ignored():
    v = DiscreteVariable((-1, 1, 100), (0.5, 0.5, 0.0))
    assert exact_xi_analysis("sum", [v, v], 0) == exact_xi_analysis("sum", [PM, PM], 0)


_point = st.integers(-3, 3)


@st.composite
def variables(draw):
    n = draw(st.integers(1, 4))
    out = []
    for _ in range(n):
        pts = draw(st.lists(_point, min_size=1, max_size=3, unique=True))
        w = draw(st.lists(st.integers(1, 8), min_size=len(pts), max_size=len(pts)))
        out.append(DiscreteVariable(tuple(pts), tuple(x / sum(w) for x in w)))
    return out


@settings(max_examples=40)
@given(variables(), st.sampled_from(["sum", "abs-sum", "max", "norm1-of-sums"]))
def test_martingale_difference_and_bounds(vs, g):
    res = analyze(g, vs)
    for a in res.xi:
        assert a.mean_residual <= 1e-12
        assert a.r_hat <= a.r_i + 1e-12
    assert res.convex_ok
    assert all(row[-1] for row in res.checks())


def test_end_to_end_by_brute_force():
    # independent brute force of P(Y - EY >= x) for g = max over {0,1}^3
    vs = [BIT] * 3
    res = analyze("max", vs)
    outcomes = [max(x) for x in itertools.product((0, 1), repeat=3)]
    ey = sum(outcomes) / 8
    assert res.mean == ey
    for x, p, br, bs, ok in res.checks():
        assert p == sum(1 for y in outcomes if y - ey >= x - 1e-12) / 8
        assert ok
    assert all(a.r_hat <= a.r_i for a in res.xi)
