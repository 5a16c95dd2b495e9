"""Per-slot signaling rules that never spend more energy than is available.

Every policy maps ``(e_avail, y_slot, draw)`` to a :class:`Symbol`.  The random
inputs of one slot arrive as a :class:`SlotDraw` so the simulator can pre-draw
them from counter-based streams and a policy stays a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Union

from scipy.special import ndtr

from .capacity.distribution import InputDistribution
from .harvest import ConstantIid, HarvestModel

DEFAULT_EPS_REL = 1e-3


class MissingDistributionError(KeyError):
    """A harvest-use policy met a harvest value with no configured law."""


class SlotDraw(NamedTuple):
    gauss: float  # standard normal behind the symbol
    unif: float  # uniform on (0, 1) deciding voluntary sleep
    z: float = 0.0  # processing energy of the slot


class Symbol(NamedTuple):
    x: float
    t: float
    slept: bool
    truncated: bool = False  # |x| < |x'|


def _clip(x_prime: float, limit: float) -> float:
    if abs(x_prime) <= limit:
        return x_prime
    return math.copysign(limit, x_prime) if limit > 0 else 0.0


@dataclass(frozen=True)
class TruncatedGaussian:
    """X = sgn(X') min(sqrt(E_avail), |X'|) with X' ~ N(0, power).

    ``gamma`` caps the usable energy for finite buffers; on a buffer of size
    gamma the stored energy never exceeds it, so the cap only matters for
    configurations that hand over more than the buffer holds.
    """

    power: float
    gamma: float = math.inf

    def __post_init__(self):
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ValueError("power must be positive and finite")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def next_symbol(self, e_avail: float, y_slot: float, draw: SlotDraw) -> Symbol:
        x_prime = math.sqrt(self.power) * draw.gauss
        x = _clip(x_prime, math.sqrt(min(e_avail, self.gamma)))
        return Symbol(x, x * x, False, abs(x) < abs(x_prime))


@dataclass(frozen=True)
class BudgetedGaussian(TruncatedGaussian):
    """The truncated-Gaussian rule with variance set to an architecture budget."""

    @classmethod
    def for_family(cls, family: str, **inputs) -> BudgetedGaussian:
        power = budget(family, **inputs)
        if power <= 0:
            raise ValueError(f"{family} budget is zero for {inputs}")
        return cls(power)


LawSource = Union[Mapping[float, InputDistribution], Callable[[float], InputDistribution], None]


def _draw_from(dist: InputDistribution, gauss: float) -> float:
    if dist.is_symmetric_two_point():
        return abs(dist.peak()) * (1.0 if gauss >= 0 else -1.0)
    return dist.quantile(float(ndtr(gauss)))


@dataclass(frozen=True)
class HarvestUse:
    """Draw the slot symbol from a peak-constrained law X(y) chosen by the harvest.

    ``dists=None`` signals at full peak, x = +-sqrt(y) with a fair sign.
    """

    dists: LawSource = None

    def law(self, y: float) -> InputDistribution | None:
        if self.dists is None:
            return None
        if callable(self.dists):
            return self.dists(y)
        try:
            return self.dists[y]
        except KeyError:
            raise MissingDistributionError(f"no input law configured for harvest {y!r}") from None

    def next_symbol(self, e_avail: float, y_slot: float, draw: SlotDraw) -> Symbol:
        peak = math.sqrt(min(e_avail, y_slot))
        dist = self.law(y_slot)
        if dist is None:
            x_prime = math.copysign(math.sqrt(y_slot), draw.gauss)
        else:
            x_prime = _draw_from(dist, draw.gauss)
        x = _clip(x_prime, peak)
        return Symbol(x, x * x, False, abs(x) < abs(x_prime))


@dataclass(frozen=True)
class SleepWake:
    """Sleep with probability ``p``, or when the processing energy is unaffordable.

    An awake slot costs ``x**2 + z``; the symbol comes from ``on_dist`` (a float
    means a zero-mean Gaussian of that variance) and is clipped to
    ``sqrt(e_avail - z)``.  ``z_model`` is the law of the processing energy.
    """

    p: float
    on_dist: InputDistribution | float
    z_model: HarvestModel = ConstantIid(0.0)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("sleep probability must lie in [0, 1]")
        if isinstance(self.on_dist, (int, float)) and not self.on_dist > 0:
            raise ValueError("Gaussian on-variance must be positive")

    def _on_symbol(self, gauss: float) -> float:
        if isinstance(self.on_dist, InputDistribution):
            return _draw_from(self.on_dist, gauss)
        return math.sqrt(self.on_dist) * gauss

    def next_symbol(self, e_avail: float, y_slot: float, draw: SlotDraw) -> Symbol:
        if draw.unif < self.p:
            return Symbol(0.0, 0.0, True)
        x_prime = self._on_symbol(draw.gauss)
        if e_avail < draw.z:
            return Symbol(0.0, 0.0, True, x_prime != 0.0)
        x = _clip(x_prime, math.sqrt(e_avail - draw.z))
        truncated = abs(x) < abs(x_prime)
        if x == 0.0:
            return Symbol(0.0, 0.0, True, truncated)
        return Symbol(x, x * x + draw.z, False, truncated)


Policy = Union[TruncatedGaussian, BudgetedGaussian, HarvestUse, SleepWake]


def next_symbol(policy: Policy, e_avail: float, y_slot: float, draw: SlotDraw) -> Symbol:
    if e_avail < 0:
        raise ValueError("available energy must be nonnegative")
    return policy.next_symbol(e_avail, y_slot, draw)


FAMILIES = ("ideal", "pe", "hsu", "hus")


def budget(family: str, *, ey: float = 0.0, ez: float = 0.0, beta1: float = 1.0,
           beta2: float = 0.0, c: float | None = None,
           eps_rel: float = DEFAULT_EPS_REL) -> float:
    """Signaling variance for a family, backed off by ``eps_rel`` of itself.

    ``ideal``: E[Y]; ``pe``: E[Y] - E[Z]; ``hsu``: beta1 E[Y] - beta2;
    ``hus``: the budget ``c``.  Nonpositive budgets give 0.
    """
    if min(ey, ez, beta1, beta2) < 0 or not 0 <= eps_rel < 1:
        raise ValueError("budget inputs must be nonnegative and eps_rel in [0, 1)")
    if family == "ideal":
        raw = ey
    elif family == "pe":
        raw = ey - ez
    elif family == "hsu":
        raw = beta1 * ey - beta2
    elif family == "hus":
        if c is None:
            raise ValueError("hus budget needs c")
        raw = c
    else:
        raise ValueError(f"unknown policy family {family!r}; expected one of {FAMILIES}")
    return raw * (1.0 - eps_rel) if raw > 0 else 0.0
