import numpy as np
import pytest

from normbound.errors import DomainError
from normbound.martingale_lab import (
    Branch,
    MartingaleModel,
    Step,
    adapted_sign_model,
    enumerate_exact,
    rademacher_model,
    simulate_mc,
)
from normbound.tail_bounds import combined_bound


def test_worker_count_invariance():
    m = adapted_sign_model(6)
    a = simulate_mc(m, 200_000, seed=77, workers=1)
    b = simulate_mc(m, 200_000, seed=77, workers=8)
    assert np.array_equal(a.count_s, b.count_s) and np.array_equal(a.count_m, b.count_m)
    assert np.array_equal(a.tail_s, b.tail_s)


def test_seed_changes_estimates():
    m = rademacher_model([1] * 10)
    a = simulate_mc(m, 20_000, seed=1)
    b = simulate_mc(m, 20_000, seed=2)
    assert not np.array_equal(a.count_s, b.count_s)


def test_matches_enumeration_within_half_width():
    m = adapted_sign_model(6)
    e = enumerate_exact(m)
    res = simulate_mc(m, 400_000, seed=3, x_grid=e.s_values)
    exact = np.array([e.tail(x) for x in e.s_values])
    # 99% intervals; allow a little slack for the number of grid points
    assert np.all(np.abs(res.tail_s - exact) <= 1.5 * res.half_width_s + 1e-12)
    mx = np.array([e.max_tail(x) for x in e.s_values])
    assert np.all(np.abs(res.tail_m - mx) <= 1.5 * res.half_width_m + 1e-12)


def test_rademacher_30_below_bound():
    n = 30
    m = rademacher_model([1 / np.sqrt(n)] * n)
    res = simulate_mc(m, 200_000, seed=11, x_grid=[3.0])
    assert res.tail_s[0] <= combined_bound(3.0, 1.0) + res.half_width_s[0]


def test_degenerate_model():
    m = MartingaleModel(steps=[Step(default=Branch((0.0,), (1.0,), C=-1, D=1), s=1.0)] * 4, initial=-0.25)
    res = simulate_mc(m, 10_000, x_grid=[-0.25, -0.2])
    assert list(res.tail_s) == [1.0, 0.0]


def test_preconditions():
    with pytest.raises(DomainError):
        simulate_mc(rademacher_model([1]), 9_999)
    with pytest.raises(DomainError):
        simulate_mc(rademacher_model([1]), 10_000, seed=-1)
