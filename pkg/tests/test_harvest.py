import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from ehcap import harvest as hv


def test_constant_path():
    np.testing.assert_array_equal(hv.sample_path(hv.ConstantIid(0.5), 3, seed=1), [0.5] * 3)


@pytest.mark.parametrize("model, mean", [(hv.example_one(), 0.625), (hv.ChiSquare1(1.0), 1.0)])
def test_sample_mean_within_three_standard_errors(model, mean):
    y = hv.sample_path(model, 10**6, seed=11)
    assert y.min() >= 0
    assert abs(y.mean() - mean) < 3 * y.std() / math.sqrt(y.size)


def test_example_one_frequencies():
    y = hv.sample_path(hv.example_one(), 200_000, seed=2)
    vals, counts = np.unique(y, return_counts=True)
    np.testing.assert_array_equal(vals, [0.25, 0.5, 0.75, 1.0])
    assert np.all(np.abs(counts / y.size - 0.25) < 0.005)


def test_periodic_phase_follows_index():
    model = hv.PeriodicMix([hv.ConstantIid(0.0), hv.ConstantIid(1.0)])
    np.testing.assert_array_equal(hv.sample_path(model, 5, seed=0), [0, 1, 0, 1, 0])
    np.testing.assert_array_equal(hv.sample_path(model, 3, seed=0, start=1), [1, 0, 1])


def test_determinism_and_slicing():
    model = hv.PeriodicMix([hv.example_one(), hv.ChiSquare1(2.0)])
    a = hv.sample_path(model, 1000, seed=5)
    np.testing.assert_array_equal(a, hv.sample_path(model, 1000, seed=5))
    np.testing.assert_array_equal(a[400:], hv.sample_path(model, 600, seed=5, start=400))


@pytest.mark.parametrize("model, mean", [
    (hv.example_one(), 0.625), (hv.ChiSquare1(2.0), 2.0),
    (hv.PeriodicMix([hv.ConstantIid(0.0), hv.ConstantIid(1.0)], period=2), 0.5)])
def test_mean(model, mean):
    assert hv.mean(model) == pytest.approx(mean, abs=1e-15)


def test_pos_part_moments_examples():
    assert hv.pos_part_moments(hv.example_one(), 0.5) == pytest.approx((0.1875, 0.0625), abs=1e-15)
    assert hv.pos_part_moments(hv.ConstantIid(1.0), 2.0) == (0.0, 1.0)
    for model in (hv.example_one(), hv.ChiSquare1(1.5), hv.ConstantIid(0.3)):
        eplus, eminus = hv.pos_part_moments(model, 0.0)
        assert eplus == pytest.approx(model.mean(), abs=1e-12) and eminus == 0.0
    with pytest.raises(ValueError):
        hv.pos_part_moments(hv.example_one(), -0.1)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.0, 10.0))
def test_chi_square_moments_match_direct_quadrature(scale, c):
    eplus, eminus = hv.pos_part_moments(hv.ChiSquare1(scale), c)
    dens = stats.chi2(df=1, scale=scale).pdf
    ref_plus = integrate.quad(lambda y: (y - c) * dens(y), c, np.inf, epsabs=1e-12)[0]
    assert eplus == pytest.approx(ref_plus, abs=1e-9)
    # E[Y - c] = E[(Y-c)^+] - E[(c-Y)^+]
    assert eplus - eminus == pytest.approx(scale - c, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=6), st.floats(0.0, 12.0))
def test_discrete_identity(values, c):
    model = hv.DiscreteIid(values)
    eplus, eminus = model.pos_part_moments(c)
    assert eplus >= 0 and eminus >= 0
    assert eplus - eminus == pytest.approx(model.mean() - c, abs=1e-12)


@pytest.mark.parametrize("bad", [
    lambda: hv.DiscreteIid([1.0, -0.1]),
    lambda: hv.DiscreteIid([1.0, 2.0], [0.5, 0.6]),
    lambda: hv.DiscreteIid([1.0], [0.5, 0.5]),
    lambda: hv.ConstantIid(-1.0),
    lambda: hv.ChiSquare1(math.inf),
    lambda: hv.PeriodicMix([]),
    lambda: hv.PeriodicMix([hv.PeriodicMix([hv.ConstantIid(1.0)])]),
    lambda: hv.PeriodicMix([hv.ConstantIid(1.0)], period=2),
])
def test_invalid_models_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_chi_square_support_is_equal_weight_quantiles():
    vals, probs = hv.ChiSquare1(2.0).support(atoms=64)
    assert probs.sum() == pytest.approx(1.0)
    assert np.all(np.diff(vals) > 0)
    assert vals @ probs == pytest.approx(2.0, rel=0.02)
