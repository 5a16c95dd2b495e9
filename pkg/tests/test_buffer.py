import math

import pytest
from hypothesis import given, settings, strategies as st

from ehcap.buffer import (Architecture, BufferConfig, BufferState, InfeasibleEnergyError,
                          available_energy, next_energy, step)

energy = st.floats(0.0, 10.0)


def test_ideal_hsu_recursion():
    cfg = BufferConfig()
    assert step(cfg, BufferState(1.0), 0.4, 0.25).energy == pytest.approx(0.85)
    assert available_energy(cfg, BufferState(1.0), 5.0) == 1.0


def test_leaky_hsu():
    cfg = BufferConfig(Architecture.HSU, beta1=0.5, beta2=0.1)
    assert next_energy(cfg, 1.0, 0.5, 1.0) == pytest.approx(0.4 + 0.5)
    assert next_energy(cfg, 0.05, 0.0, 0.0) == 0.0


def test_hu_is_stateless():
    cfg = BufferConfig(Architecture.HU)
    assert available_energy(cfg, BufferState(3.0), 0.5) == 0.5
    assert next_energy(cfg, 3.0, 0.5, 0.5) == 0.0
    with pytest.raises(InfeasibleEnergyError):
        next_energy(cfg, 3.0, 0.6, 0.5)


def test_hus_spends_fresh_harvest_first():
    cfg = BufferConfig(Architecture.HUS, beta1=0.5)
    # surplus of the harvest is stored at efficiency beta1
    assert next_energy(cfg, 1.0, 0.2, 1.0) == pytest.approx(1.4)
    # a deficit is drawn from storage without loss
    assert next_energy(cfg, 1.0, 1.5, 1.0) == pytest.approx(0.5)
    assert available_energy(cfg, BufferState(1.0), 1.0) == 2.0


def test_finite_buffer_caps_energy():
    cfg = BufferConfig(gamma=1.0)
    assert next_energy(cfg, 0.9, 0.0, 0.5) == 1.0


def test_infeasible_spend_raises_but_tolerance_allows_roundoff():
    cfg = BufferConfig()
    assert next_energy(cfg, 1.0, 1.0 + 1e-13, 0.0) == 0.0
    with pytest.raises(InfeasibleEnergyError):
        next_energy(cfg, 1.0, 1.0 + 1e-9, 0.0)


@pytest.mark.parametrize("kw", [dict(beta1=0.0), dict(beta1=1.5), dict(beta2=-1.0),
                                dict(gamma=0.0), dict(architecture="XYZ")])
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        BufferConfig(**kw)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(list(Architecture)), st.floats(0.05, 1.0), st.floats(0.0, 0.5),
       st.floats(0.5, math.inf) | st.just(math.inf), energy, energy, st.floats(0.0, 1.0))
def test_energy_stays_in_range(arch, b1, b2, gamma, e, y, frac):
    cfg = BufferConfig(arch, b1, b2, gamma)
    e = min(e, gamma)
    t = frac * available_energy(cfg, BufferState(e), y)
    e_next = next_energy(cfg, e, t, y)
    assert 0.0 <= e_next <= gamma


@settings(max_examples=100, deadline=None)
@given(energy, energy, st.floats(0.0, 1.0))
def test_lossless_hsu_and_hus_conserve_energy(e, y, frac):
    for arch in (Architecture.HSU, Architecture.HUS):
        cfg = BufferConfig(arch)
        t = frac * available_energy(cfg, BufferState(e), y)
        assert next_energy(cfg, e, t, y) == pytest.approx(e + y - t, abs=1e-12)
