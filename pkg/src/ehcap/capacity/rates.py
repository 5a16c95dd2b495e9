"""Capacities and achievable rates for the harvesting architectures (nats)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..harvest import ChiSquare1, HarvestModel, PeriodicMix, pos_part_moments
from .distribution import (AwgnChannel, InputDistribution, mixture_divergence,
                           mutual_information)
from .solver import DEFAULT_TOL, consolidate, solve_grid

DEFAULT_GRID = 501
CONSOLIDATION_THRESHOLD = 1e-6
CHI_SQUARE_ATOMS = 64


class FitError(ValueError):
    """Too little support to fit the Kuhn-Tucker density."""


@dataclass
class CapacityResult:
    rate: float
    dist: InputDistribution
    certificate_gap: float = 0.0
    iterations: int = 0
    multiplier: float = 0.0

    @property
    def p_sleep(self) -> float:
        return self.dist.sleep_probability()


def _degenerate() -> CapacityResult:
    return CapacityResult(0.0, InputDistribution.deterministic_zero())


def awgn_capacity(power: float, channel: AwgnChannel) -> float:
    """0.5 * ln(1 + P / sigma^2); nonpositive power gives 0."""
    if power <= 0:
        return 0.0
    return 0.5 * math.log1p(power / channel.sigma2)


def _odd(n: int) -> int:
    return n if n % 2 else n + 1


def peak_average_capacity(peak: float, avg_power: float, channel: AwgnChannel, *,
                          grid_points: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                          max_iter: int = 10_000) -> CapacityResult:
    """Capacity under |X| <= peak and E[X^2] <= avg_power (``math.inf`` = peak only)."""
    if peak <= 0 or avg_power <= 0:
        return _degenerate()
    x = np.linspace(-peak, peak, _odd(grid_points))
    budget = None if avg_power >= peak * peak * (1 - 1e-12) else float(avg_power)
    sol = solve_grid(x, x * x, budget, channel.sigma2, tol=tol, max_iter=max_iter)
    amps, probs = consolidate(x, sol.r, CONSOLIDATION_THRESHOLD)
    dist = InputDistribution.point_masses(amps, probs)
    if mutual_information(dist, channel) < sol.rate - 1e-6:
        keep = sol.r > 0
        dist = InputDistribution.point_masses(x[keep], sol.r[keep])
    return CapacityResult(sol.rate, dist, sol.gap, sol.iterations, sol.multiplier)


def _harvest_support(model: HarvestModel, atoms: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(model, ChiSquare1):
        return model.support(atoms)
    if isinstance(model, PeriodicMix):
        parts = [_harvest_support(p, atoms) for p in model.phases]
        return (np.concatenate([v for v, _ in parts]),
                np.concatenate([w for _, w in parts]) / model.period)
    return model.support()


@dataclass
class HarvestUseCapacity:
    rate: float
    values: np.ndarray
    probs: np.ndarray
    per_value: dict = field(default_factory=dict)


def hu_capacity(model: HarvestModel, channel: AwgnChannel, *,
                chi_square_atoms: int = CHI_SQUARE_ATOMS, **solver_kw) -> HarvestUseCapacity:
    """Rate with no storage: E_Y[C(peak sqrt(Y), power Y)].

    The per-slot energy cap is Y, so both the squared peak and the average
    power of the slot law equal the harvested value.
    """
    values, probs = _harvest_support(model, chi_square_atoms)
    per_value = {}
    for y in np.unique(values):
        per_value[float(y)] = peak_average_capacity(math.sqrt(y), y, channel, **solver_kw)
    rate = math.fsum(p * per_value[float(y)].rate for y, p in zip(values, probs))
    return HarvestUseCapacity(rate, values, probs, per_value)


def pe_half_width(ey: float, channel: AwgnChannel) -> float:
    return 8.0 * math.sqrt(channel.sigma2 + ey)


def pe_capacity(ey: float, ez: float, channel: AwgnChannel, sleep_allowed: bool = True, *,
                grid_points: int = DEFAULT_GRID, half_width: float | None = None,
                tol: float = DEFAULT_TOL, max_iter: int = 10_000) -> CapacityResult:
    """Capacity with processing energy ``ez`` spent in every awake slot.

    With sleep the cost of symbol x is ``x^2 + ez`` for x != 0 and 0 for x = 0,
    and the law maximizes I(X;W) under E[cost] <= ey.  The returned law is an atom
    at zero (the sleep probability) plus a gridded density.
    """
    if ey < 0 or ez < 0:
        raise ValueError("ey and ez must be nonnegative")
    if not sleep_allowed:
        power = ey - ez
        if power <= 0:
            return _degenerate()
        return CapacityResult(awgn_capacity(power, channel), InputDistribution.gaussian(power))
    if ey == 0:
        return _degenerate()
    width = half_width if half_width is not None else pe_half_width(ey, channel)
    x = np.linspace(-width, width, _odd(grid_points))
    mid = x.size // 2
    x[mid] = 0.0
    cost = np.where(x != 0, x * x + ez, 0.0)
    sol = solve_grid(x, cost, float(ey), channel.sigma2, tol=tol, max_iter=max_iter)
    return CapacityResult(sol.rate, _split_atom(x, sol.r, mid), sol.gap,
                          sol.iterations, sol.multiplier)


def _split_atom(x: np.ndarray, r: np.ndarray, mid: int) -> InputDistribution:
    """Separate the sleep atom from the density at the zero grid point.

    The continuous part at zero is taken as the mean of its two neighbours;
    whatever the zero point carries beyond that is the atom.
    """
    dx = x[1] - x[0]
    smooth = 0.5 * (r[mid - 1] + r[mid + 1])
    atom = max(r[mid] - smooth, 0.0)
    dens = r / dx
    dens[mid] = (r[mid] - atom) / dx
    total = atom + dens.sum() * dx
    return InputDistribution(atom / total, density_grid=(x, dens / total))


@dataclass
class KtFit:
    k1: float
    k2: float
    p: float
    max_deviation: float
    relative_deviation: float
    cost: float
    cost_error: float

    @property
    def cost_ok(self) -> bool:
        return self.cost_error <= 1e-4


def kt_density(a, k1: float, k2: float, p: float, sigma2: float):
    """(k1 exp(-k2 a^2) - p N(a; 0, sigma2) / (1 - p))^+."""
    a = np.asarray(a, dtype=float)
    noise = np.exp(-0.5 * a * a / sigma2) / math.sqrt(2 * math.pi * sigma2)
    return np.maximum(k1 * np.exp(-k2 * a * a) - p / (1 - p) * noise, 0.0)


def kt_density_check(result: CapacityResult, ey: float, ez: float,
                     channel: AwgnChannel,
                     support_tol: float = CONSOLIDATION_THRESHOLD) -> KtFit:
    """Fit the Kuhn-Tucker density form to the solver's transmit density.

    ``k1, k2`` are fitted by least squares on the grid points carrying mass; the
    deviation is reported over the whole grid.
    """
    dist = result.dist
    if dist.density_grid is None:
        raise FitError("result has no gridded density")
    p = dist.sleep_probability()
    gx, gw = dist.density_grid
    if p >= 1.0:
        raise FitError("the node always sleeps")
    f = gw / (1.0 - p)
    on = f * dist.spacing > support_tol
    if on.sum() < 3:
        raise FitError(f"only {int(on.sum())} grid points carry transmit mass")
    a = gx[on]
    var = float(f @ gx**2 * dist.spacing)
    k2_0 = 1.0 / (2.0 * max(var, 1e-6))
    noise0 = p / (1 - p) / math.sqrt(2 * math.pi * channel.sigma2)
    k1_0 = float(f.max()) + noise0

    def resid(theta):
        return kt_density(a, math.exp(theta[0]), math.exp(theta[1]), p,
                          channel.sigma2) - f[on]

    fit = optimize.least_squares(resid, [math.log(k1_0), math.log(k2_0)],
                                 method="lm", xtol=1e-14, ftol=1e-14)
    k1, k2 = (math.exp(v) for v in fit.x)
    model = kt_density(gx, k1, k2, p, channel.sigma2)
    dev = float(np.max(np.abs(model - f)))
    cost = dist.expected_cost(ez)
    return KtFit(k1, k2, p, dev, dev / float(f.max()), cost, abs(cost - ey))


def onoff_decomposition(dist: InputDistribution,
                        channel: AwgnChannel) -> tuple[float, float, float]:
    """``(I(X;W), I(B;W), I(G;G+N))`` for X = B*G with B = 1{X != 0}.

    The ON-OFF term is computed directly as the binary-input information
    ``p*D(N || W) + (1-p)*D(G+N || W)``, not as a difference of the other two.
    """
    p = dist.sleep_probability()
    on = dist.off_zero()
    if on is None:
        return 0.0, 0.0, 0.0
    i_total = mutual_information(dist, channel)
    i_gauss = mutual_information(on, channel)
    if p <= 0.0:
        return i_total, 0.0, i_gauss
    w_locs, w_probs = dist.components()
    g_locs, g_probs = on.components()
    sigma = channel.sigma
    zero = np.zeros(1), np.ones(1)
    i_onoff = (p * mixture_divergence(*zero, w_locs, w_probs, sigma)
               + (1 - p) * mixture_divergence(g_locs, g_probs, w_locs, w_probs, sigma))
    return i_total, i_onoff, i_gauss


def hus_budget(model: HarvestModel, beta1: float, beta2: float, tol: float = 1e-14) -> float:
    """Largest c with beta1*E[(Y-c)^+] >= E[(c-Y)^+] + beta2 (0 if none).

    The left side minus the right is continuous and strictly decreasing in c,
    so the answer is its unique root.
    """
    if not 0 < beta1 <= 1 or beta2 < 0:
        raise ValueError("need 0 < beta1 <= 1 and beta2 >= 0")

    def g(c):
        eplus, eminus = pos_part_moments(model, c)
        return beta1 * eplus - eminus - beta2

    if g(0.0) <= 0:
        return 0.0
    hi = model.upper()
    if not math.isfinite(hi):
        # g(c) <= (1 + beta1) E[Y] - c - beta2
        hi = (1.0 + beta1) * model.mean()
    if g(hi) >= 0:
        return hi
    return optimize.brentq(g, 0.0, hi, xtol=tol)


ARCHITECTURES = ("ideal", "pe", "hsu", "hus", "hu", "finite")


def achievable_rate(arch: str, model: HarvestModel, channel: AwgnChannel, *,
                    beta1: float = 1.0, beta2: float = 0.0, ez: float = 0.0,
                    gamma: float | None = None) -> float:
    """Table rate for an architecture, with the epsilon back-off at its limit 0.

    ``ideal``: infinite ideal buffer; ``pe``: processing energy without sleep;
    ``hsu``/``hus``: lossy storage; ``hu``: no storage; ``finite``: the upper
    bound for a buffer of size ``gamma``.
    """
    ey = model.mean()
    if arch == "ideal":
        return awgn_capacity(ey, channel)
    if arch == "pe":
        return awgn_capacity(ey - ez, channel)
    if arch == "hsu":
        return awgn_capacity(beta1 * ey - beta2, channel)
    if arch == "hus":
        return awgn_capacity(hus_budget(model, beta1, beta2), channel)
    if arch == "hu":
        return hu_capacity(model, channel).rate
    if arch == "finite":
        if gamma is None:
            raise ValueError("finite buffer bound needs gamma")
        return peak_average_capacity(math.sqrt(gamma), ey, channel).rate
    raise ValueError(f"unknown architecture {arch!r}; expected one of {ARCHITECTURES}")
