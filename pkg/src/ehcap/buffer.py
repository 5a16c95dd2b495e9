"""Energy buffer recursions for the HSU, HU and HUS architectures."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

FEASIBILITY_TOL = 1e-12


class InfeasibleEnergyError(RuntimeError):
    """A policy asked for more energy than the buffer could supply."""


class Architecture(str, enum.Enum):
    HSU = "HSU"  # harvest, store, use
    HU = "HU"  # harvest, use (no storage)
    HUS = "HUS"  # harvest, use, store the remainder


@dataclass(frozen=True)
class BufferConfig:
    architecture: Architecture = Architecture.HSU
    beta1: float = 1.0
    beta2: float = 0.0
    gamma: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        if not 0.0 < self.beta1 <= 1.0:
            raise ValueError("beta1 must lie in (0, 1]")
        if not self.beta2 >= 0.0:
            raise ValueError("beta2 must be nonnegative")
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class BufferState:
    energy: float = 0.0

    def __post_init__(self):
        if not self.energy >= 0.0:
            raise ValueError("stored energy must be nonnegative")


def available_energy(cfg: BufferConfig, state: BufferState, y: float) -> float:
    return _available(cfg.architecture, state.energy, y)


def _available(arch: Architecture, e: float, y: float) -> float:
    if arch is Architecture.HSU:
        return e
    if arch is Architecture.HU:
        return y
    return e + y


def step(cfg: BufferConfig, state: BufferState, t: float, y: float) -> BufferState:
    """Advance one slot after spending ``t`` out of the available energy."""
    return BufferState(next_energy(cfg, state.energy, t, y))


def next_energy(cfg: BufferConfig, e: float, t: float, y: float) -> float:
    """Float-level :func:`step`, used by the simulator's inner loop."""
    arch = cfg.architecture
    avail = _available(arch, e, y)
    if t > avail + FEASIBILITY_TOL:
        raise InfeasibleEnergyError(
            f"{arch.value}: spent {t!r} but only {avail!r} available")
    if arch is Architecture.HU:
        return 0.0
    if arch is Architecture.HSU:
        e_next = max(e - t - cfg.beta2, 0.0) + cfg.beta1 * y
    else:
        e_next = e + cfg.beta1 * max(y - t, 0.0) - max(t - y, 0.0)
        e_next = max(max(e_next, 0.0) - cfg.beta2, 0.0)
    return min(cfg.gamma, e_next)
