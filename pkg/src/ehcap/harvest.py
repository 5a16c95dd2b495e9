"""Harvest processes {Y_k}: sampling and the moments the rate formulas need."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import integrate, special, stats

from . import rng

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteIid:
    """i.i.d. harvests on a finite support."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __init__(self, values: Sequence[float], probs: Sequence[float] | None = None):
        values = tuple(float(v) for v in values)
        if probs is None:
            probs = [1.0 / len(values)] * len(values)
        probs = tuple(float(p) for p in probs)
        if not values or len(values) != len(probs):
            raise ValueError("values and probs must be non-empty and of equal length")
        if min(values) < 0 or not all(math.isfinite(v) for v in values):
            raise ValueError("harvest values must be finite and nonnegative")
        if min(probs) < 0 or abs(math.fsum(probs) - 1.0) > _PROB_TOL:
            raise ValueError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    def pos_part_moments(self, c: float) -> tuple[float, float]:
        eplus = math.fsum(p * max(v - c, 0.0) for v, p in zip(self.values, self.probs))
        eminus = math.fsum(p * max(c - v, 0.0) for v, p in zip(self.values, self.probs))
        return eplus, eminus

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.values), np.array(self.probs)

    def upper(self) -> float:
        return max(self.values)

    def _transform(self, u: np.ndarray, g: np.ndarray) -> np.ndarray:
        cdf = np.cumsum(self.probs)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, u, side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]


@dataclass(frozen=True)
class ConstantIid:
    y: float

    def __post_init__(self):
        if not (self.y >= 0 and math.isfinite(self.y)):
            raise ValueError("constant harvest must be finite and nonnegative")

    def mean(self) -> float:
        return float(self.y)

    def pos_part_moments(self, c: float) -> tuple[float, float]:
        return max(self.y - c, 0.0), max(c - self.y, 0.0)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([float(self.y)]), np.array([1.0])

    def upper(self) -> float:
        return float(self.y)

    def _transform(self, u: np.ndarray, g: np.ndarray) -> np.ndarray:
        return np.full(u.shape, float(self.y))


@dataclass(frozen=True)
class ChiSquare1:
    """Y = scale * G**2 with G standard normal."""

    scale: float

    def __post_init__(self):
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be finite and nonnegative")

    def mean(self) -> float:
        return float(self.scale)

    def pos_part_moments(self, c: float) -> tuple[float, float]:
        s = self.scale
        if s == 0.0:
            return 0.0, max(c, 0.0)
        if c <= 0.0:
            return s - c, 0.0
        # E[(c - Y)^+] over the bounded range [0, c]; the other part by the identity
        dens = stats.chi2(df=1, scale=s).pdf
        eminus, _ = integrate.quad(lambda y: (c - y) * dens(y), 0.0, c,
                                   epsabs=1e-12, epsrel=1e-12, limit=200)
        return s - c + eminus, eminus

    def support(self, atoms: int = 64) -> tuple[np.ndarray, np.ndarray]:
        """Quantile-midpoint discretization with equal weights."""
        u = (np.arange(atoms) + 0.5) / atoms
        return self.scale * special.chdtri(1, 1.0 - u), np.full(atoms, 1.0 / atoms)

    def upper(self) -> float:
        return math.inf

    def _transform(self, u: np.ndarray, g: np.ndarray) -> np.ndarray:
        return self.scale * g * g


@dataclass(frozen=True)
class PeriodicMix:
    """Slot ``k`` draws from ``phases[k % period]``."""

    phases: tuple
    period: int = field(default=0)

    def __init__(self, phases, period: int | None = None):
        phases = tuple(phases)
        if not phases:
            raise ValueError("PeriodicMix needs at least one phase")
        if any(isinstance(p, PeriodicMix) for p in phases):
            raise ValueError("phases of a PeriodicMix cannot be periodic")
        period = len(phases) if period is None else int(period)
        if period != len(phases):
            raise ValueError("period must equal the number of phases")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "period", period)

    def mean(self) -> float:
        return math.fsum(p.mean() for p in self.phases) / self.period

    def pos_part_moments(self, c: float) -> tuple[float, float]:
        parts = [p.pos_part_moments(c) for p in self.phases]
        return (math.fsum(a for a, _ in parts) / self.period,
                math.fsum(b for _, b in parts) / self.period)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        vals, probs = zip(*(p.support() for p in self.phases))
        return np.concatenate(vals), np.concatenate(probs) / self.period

    def upper(self) -> float:
        return max(p.upper() for p in self.phases)

    def _transform(self, u: np.ndarray, g: np.ndarray, start: int = 0) -> np.ndarray:
        out = np.empty(u.shape)
        phase = (np.arange(u.size) + start) % self.period
        for i, model in enumerate(self.phases):
            sel = phase == i
            out[sel] = model._transform(u[sel], g[sel])
        return out


HarvestModel = Union[DiscreteIid, ConstantIid, ChiSquare1, PeriodicMix]


def example_one() -> DiscreteIid:
    """Equiprobable harvests on {0.25, 0.5, 0.75, 1}."""
    return DiscreteIid([0.25, 0.5, 0.75, 1.0])


def sample_path(model: HarvestModel, n: int, seed: int, start: int = 0,
                stream: int = rng.HARVEST) -> np.ndarray:
    """Harvests ``Y_start .. Y_{start+n-1}``; slot ``k`` depends only on (seed, k)."""
    if n < 1:
        raise ValueError("n must be positive")
    u = rng.uniforms(seed, stream, n, start)
    g = rng.normals(seed, stream + 1, n, start)
    if isinstance(model, PeriodicMix):
        return model._transform(u, g, start)
    return model._transform(u, g)


def mean(model: HarvestModel) -> float:
    return model.mean()


def pos_part_moments(model: HarvestModel, c: float) -> tuple[float, float]:
    """``(E[(Y-c)^+], E[(c-Y)^+])``."""
    if c < 0:
        raise ValueError("c must be nonnegative")
    return model.pos_part_moments(float(c))
