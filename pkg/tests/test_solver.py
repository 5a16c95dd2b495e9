import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehcap.capacity import (AwgnChannel, ConvergenceError, InputDistribution, consolidate,
                            mutual_information, solve_grid)
from ehcap.capacity.solver import certificate
from oracles import gaussian_capacity, mi_quad, three_point_mi


def test_three_point_grid_matches_brute_force():
    # on {-1, 0, 1} the optimum is the best symmetric mass at zero
    x = np.array([-1.0, 0.0, 1.0])
    sol = solve_grid(x, x * x, None, 1.0, tol=1e-10)
    p0s = np.linspace(0, 0.5, 501)
    ref = max(three_point_mi(1.0, p0) for p0 in p0s)
    assert sol.rate == pytest.approx(ref, abs=1e-6)
    assert sol.r[0] == pytest.approx(sol.r[2], abs=1e-8)


def test_returned_law_carries_the_rate():
    x = np.linspace(-2, 2, 201)
    sol = solve_grid(x, x * x, 0.5, 1.0)
    keep = sol.r > 0
    ref = mi_quad(x[keep], sol.r[keep] / sol.r[keep].sum())
    assert sol.rate == pytest.approx(ref, abs=1e-6)
    assert sol.r @ (x * x) <= 0.5 + 1e-12
    assert sol.gap <= 1e-6


def test_average_power_solution_below_gaussian_bound():
    x = np.linspace(-8, 8, 401)
    sol = solve_grid(x, x * x, 1.0, 1.0)
    assert sol.rate <= gaussian_capacity(1.0) + 1e-6
    assert sol.rate > gaussian_capacity(1.0) - 2e-3


def test_budget_edges():
    x = np.linspace(-1, 1, 21)
    cost = x * x + 0.5
    with pytest.raises(ValueError):
        solve_grid(x, cost, 0.4, 1.0)
    lo = solve_grid(x, cost, 0.5, 1.0)
    assert lo.rate == 0.0 and lo.r[10] == 1.0
    free = solve_grid(x, cost, None, 1.0)
    loose = solve_grid(x, cost, 10.0, 1.0)
    assert loose.rate == free.rate


def test_convergence_failure_is_reported():
    x = np.linspace(-6, 6, 301)
    with pytest.raises(ConvergenceError):
        solve_grid(x, x * x, 1.0, 1.0, tol=1e-14, max_iter=3)


def test_certificate_is_zero_for_kt_point():
    info = np.array([1.0, 0.5, 1.0])
    gap, lam = certificate(info, 1.0, np.array([1.0, 0.0, 1.0]), None)
    assert gap == 0.0 and lam == 0.0
    # with a binding budget the multiplier prices the cost difference
    gap, lam = certificate(np.array([0.0, 1.0]), 0.5, np.array([0.0, 1.0]), 0.5)
    assert gap == pytest.approx(0.0, abs=1e-12) and lam == pytest.approx(1.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 1.5), st.floats(0.3, 3.0))
def test_rate_monotone_in_peak(a, sigma2):
    small = solve_grid(np.linspace(-a, a, 41), np.linspace(-a, a, 41) ** 2, None, sigma2)
    big = solve_grid(np.linspace(-2 * a, 2 * a, 81), np.linspace(-2 * a, 2 * a, 81) ** 2,
                     None, sigma2)
    assert big.rate >= small.rate - 1e-6


def test_consolidate_merges_runs_and_keeps_means():
    x = np.linspace(-1, 1, 11)
    r = np.zeros(11)
    r[[0, 1]] = [0.3, 0.1]
    r[[9, 10]] = [0.1, 0.3]
    r[5] = 0.2
    c, m = consolidate(x, r)
    np.testing.assert_allclose(c, [-0.95, 0.0, 0.95])
    np.testing.assert_allclose(m, [0.4, 0.2, 0.4])


def test_consolidate_splits_at_local_minimum():
    x = np.arange(5.0)
    r = np.array([0.3, 0.05, 0.3, 0.05, 0.3])
    c, m = consolidate(x, r / r.sum())
    assert c.size >= 3


def test_consolidated_law_information(channel):
    x = np.linspace(-1.5, 1.5, 301)
    sol = solve_grid(x, x * x, None, 1.0)
    c, m = consolidate(x, sol.r)
    assert mutual_information(InputDistribution.point_masses(c, m), channel) == pytest.approx(
        sol.rate, abs=1e-6)
