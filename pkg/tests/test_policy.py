import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehcap import policy as pol
from ehcap.capacity import InputDistribution
from ehcap.harvest import ConstantIid

draws = st.builds(pol.SlotDraw, st.floats(-6, 6), st.floats(1e-9, 1 - 1e-9), st.floats(0, 2))
energy = st.floats(0.0, 20.0)


def test_truncated_gaussian_examples():
    tg = pol.TruncatedGaussian(1.0)
    assert tuple(tg.next_symbol(0.0, 0.0, pol.SlotDraw(0.7, 0.5)))[:3] == (0.0, 0.0, False)
    x, t, slept, trunc = tg.next_symbol(math.inf, 0.0, pol.SlotDraw(-1.3, 0.5))
    assert (x, t, slept, trunc) == (-1.3, pytest.approx(1.69), False, False)
    x, t, _, trunc = tg.next_symbol(0.25, 0.0, pol.SlotDraw(-1.3, 0.5))
    assert x == -0.5 and t == 0.25 and trunc


def test_always_sleep():
    sw = pol.SleepWake(1.0, 1.0)
    assert sw.next_symbol(5.0, 1.0, pol.SlotDraw(2.0, 0.999)) == (0.0, 0.0, True, False)


def test_forced_sleep_when_processing_unaffordable():
    sw = pol.SleepWake(0.0, 1.0)
    sym = sw.next_symbol(0.5, 0.0, pol.SlotDraw(1.0, 0.5, z=1.0))
    assert sym.slept and sym.t == 0.0 and sym.truncated


def test_sleep_wake_cost_includes_processing():
    sw = pol.SleepWake(0.0, 4.0)
    x, t, slept, trunc = sw.next_symbol(10.0, 0.0, pol.SlotDraw(0.5, 0.5, z=1.0))
    assert x == 1.0 and t == 2.0 and not slept and not trunc
    x, t, _, trunc = sw.next_symbol(2.0, 0.0, pol.SlotDraw(1.5, 0.5, z=1.0))
    assert x == 1.0 and t == 2.0 and trunc


@settings(max_examples=300, deadline=None)
@given(energy, energy, draws)
def test_every_policy_respects_available_energy(e, y, draw):
    policies = [pol.TruncatedGaussian(2.0), pol.SleepWake(0.3, 2.0),
                pol.SleepWake(0.0, InputDistribution.point_masses([-3, 0, 3], [1, 1, 1])),
                pol.HarvestUse()]
    for p in policies:
        x, t, slept, _ = pol.next_symbol(p, e, y, draw)
        assert t <= e + 1e-12
        if slept:
            assert x == 0.0 and t == 0.0
    x, t, _, _ = pol.HarvestUse().next_symbol(math.inf, y, draw)
    assert abs(x) <= math.sqrt(y) + 1e-15


@settings(max_examples=300, deadline=None)
@given(energy, draws)
def test_sleep_wake_without_sleep_or_processing_matches_truncated_gaussian(e, draw):
    draw = draw._replace(z=0.0)
    a = pol.TruncatedGaussian(1.7).next_symbol(e, 0.0, draw)
    b = pol.SleepWake(0.0, 1.7).next_symbol(e, 0.0, draw)
    assert (a.x, a.t, a.truncated) == (b.x, b.t, b.truncated)


def test_harvest_use_laws():
    two = InputDistribution.point_masses([-0.5, 0.5], [0.5, 0.5])
    hu = pol.HarvestUse({0.25: two})
    assert hu.next_symbol(1.0, 0.25, pol.SlotDraw(0.1, 0.5)).x == 0.5
    assert hu.next_symbol(1.0, 0.25, pol.SlotDraw(-0.1, 0.5)).x == -0.5
    with pytest.raises(pol.MissingDistributionError):
        hu.next_symbol(1.0, 0.5, pol.SlotDraw(0.1, 0.5))
    three = InputDistribution.point_masses([-1, 0, 1], [0.25, 0.5, 0.25])
    hu3 = pol.HarvestUse(lambda y: three)
    gs = np.random.default_rng(0).standard_normal(20_000)
    xs = np.array([hu3.next_symbol(1.0, 1.0, pol.SlotDraw(g, 0.5)).x for g in gs])
    assert set(xs) == {-1.0, 0.0, 1.0}
    assert np.mean(xs == 0.0) == pytest.approx(0.5, abs=0.02)
    assert np.mean(xs == 1.0) == pytest.approx(0.25, abs=0.02)


def test_full_peak_harvest_use():
    sym = pol.HarvestUse().next_symbol(4.0, 4.0, pol.SlotDraw(-0.2, 0.5))
    assert sym.x == -2.0 and sym.t == 4.0


def test_budget_examples():
    assert pol.budget("ideal", ey=1.0) == pytest.approx(0.999)
    assert pol.budget("pe", ey=1.0, ez=1.0) == 0.0
    assert pol.budget("hsu", ey=1.0, beta1=0.7, beta2=0.1) == pytest.approx(0.6 * 0.999)
    assert pol.budget("hus", c=0.5, eps_rel=0.0) == 0.5
    assert pol.budget("hsu", ey=0.1, beta1=0.5, beta2=0.2) == 0.0
    with pytest.raises(ValueError):
        pol.budget("warp", ey=1.0)
    with pytest.raises(ValueError):
        pol.budget("ideal", ey=-1.0)


def test_budgeted_gaussian():
    bg = pol.BudgetedGaussian.for_family("hsu", ey=1.0, beta1=0.5)
    assert bg.power == pytest.approx(0.4995)
    with pytest.raises(ValueError):
        pol.BudgetedGaussian.for_family("pe", ey=1.0, ez=2.0)


def test_invalid_policies():
    with pytest.raises(ValueError):
        pol.TruncatedGaussian(0.0)
    with pytest.raises(ValueError):
        pol.SleepWake(1.5, 1.0)
    with pytest.raises(ValueError):
        pol.next_symbol(pol.TruncatedGaussian(1.0), -1.0, 0.0, pol.SlotDraw(0.0, 0.5))


def test_default_processing_model_is_zero():
    assert pol.SleepWake(0.5, 1.0).z_model == ConstantIid(0.0)
