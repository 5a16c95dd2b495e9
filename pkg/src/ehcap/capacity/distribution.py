"""Channel-input laws and the quadrature behind every mutual-information value.

All mutual informations are in nats.  The output of an AWGN channel driven by
an :class:`InputDistribution` is a Gaussian mixture (atoms and density-grid
points alike become mixture components), so ``I(X;W) = h(W) - h(N)`` reduces
to a one-dimensional entropy integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

MASS_TOL = 1e-9
TAIL_SIGMAS = 8.0
_CHUNK = 2_000_000


class QuadratureError(RuntimeError):
    """Trapezoid refinement did not settle within the allowed number of levels."""


@dataclass(frozen=True)
class AwgnChannel:
    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError("noise variance must be positive and finite")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def noise_entropy(self) -> float:
        return 0.5 * math.log(2 * math.pi * math.e * self.sigma2)


@dataclass(frozen=True, eq=False)
class InputDistribution:
    """Atom at zero (sleep), discrete mass points, and an optional gridded density.

    ``density_grid`` is ``(amplitudes, weights)`` on a uniform grid: ``weights``
    are density values and the continuous part carries mass
    ``sum(weights) * spacing``.
    """

    zero_atom: float = 0.0
    mass_points: tuple[np.ndarray, np.ndarray] = field(
        default_factory=lambda: (np.empty(0), np.empty(0)))
    density_grid: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        amps, probs = (np.asarray(a, dtype=float) for a in self.mass_points)
        if amps.shape != probs.shape or amps.ndim != 1:
            raise ValueError("mass points need matching 1-d amplitudes and probabilities")
        if not np.all(np.isfinite(amps)) or np.any(probs < 0):
            raise ValueError("amplitudes must be finite and probabilities nonnegative")
        object.__setattr__(self, "mass_points", (amps, probs))
        total = self.zero_atom + probs.sum()
        if self.density_grid is not None:
            gx, gw = (np.asarray(a, dtype=float) for a in self.density_grid)
            if gx.shape != gw.shape or gx.size < 2:
                raise ValueError("density grid needs at least two points")
            steps = np.diff(gx)
            if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(steps[0])):
                raise ValueError("density grid must be uniform and increasing")
            if not np.all(np.isfinite(gx)) or np.any(gw < 0):
                raise ValueError("density grid must be finite and nonnegative")
            object.__setattr__(self, "density_grid", (gx, gw))
            total += gw.sum() * self.spacing
        if not 0.0 <= self.zero_atom <= 1.0:
            raise ValueError("zero_atom must lie in [0, 1]")
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"total probability {total!r} differs from 1")

    @property
    def spacing(self) -> float:
        if self.density_grid is None:
            return 0.0
        gx = self.density_grid[0]
        return (gx[-1] - gx[0]) / (gx.size - 1)

    # construction helpers -------------------------------------------------

    @classmethod
    def point_masses(cls, amplitudes, probs) -> InputDistribution:
        amps = np.asarray(amplitudes, dtype=float)
        probs = np.asarray(probs, dtype=float)
        return cls(0.0, (amps, probs / probs.sum()))

    @classmethod
    def deterministic_zero(cls) -> InputDistribution:
        return cls(1.0)

    @classmethod
    def gaussian(cls, power: float, points: int = 1601, width: float = 10.0,
                 zero_atom: float = 0.0) -> InputDistribution:
        """Zero-mean Gaussian with variance ``power`` on ``[-width*sd, width*sd]``,
        carrying total mass ``1 - zero_atom``."""
        if power <= 0:
            return cls(1.0)
        sd = math.sqrt(power)
        gx = np.linspace(-width * sd, width * sd, points)
        dens = np.exp(-0.5 * gx**2 / power)
        dens *= (1.0 - zero_atom) / (dens.sum() * (gx[1] - gx[0]))
        return cls(zero_atom, density_grid=(gx, dens))

    # views ----------------------------------------------------------------

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        """All support points with their probabilities (density as rectangle weights)."""
        locs = [np.zeros(1), self.mass_points[0]]
        wts = [np.array([self.zero_atom]), self.mass_points[1]]
        if self.density_grid is not None:
            locs.append(self.density_grid[0])
            wts.append(self.density_grid[1] * self.spacing)
        x = np.concatenate(locs)
        w = np.concatenate(wts)
        keep = w > 0
        return x[keep], w[keep]

    def second_moment(self) -> float:
        x, w = self.components()
        return float(w @ x**2)

    def expected_cost(self, alpha: float) -> float:
        """E[b(X)] with b(x) = x**2 + alpha for x != 0 and b(0) = 0."""
        x, w = self.components()
        return float(w @ np.where(x != 0, x**2 + alpha, 0.0))

    def sleep_probability(self) -> float:
        amps, probs = self.mass_points
        return float(self.zero_atom + probs[amps == 0].sum())

    def peak(self) -> float:
        x, _ = self.components()
        return float(np.abs(x).max()) if x.size else 0.0

    def off_zero(self) -> InputDistribution | None:
        """Law of X given that the node transmits; ``None`` if it always sleeps."""
        p = self.sleep_probability()
        if p >= 1.0 - 1e-15:
            return None
        amps, probs = self.mass_points
        nz = amps != 0
        scale = 1.0 / (1.0 - p)
        grid = None
        if self.density_grid is not None:
            grid = (self.density_grid[0], self.density_grid[1] * scale)
        mp = (amps[nz], probs[nz] * scale)
        # absorb round-off so validation sees exact unit mass
        mass = mp[1].sum() + (grid[1].sum() * self.spacing if grid else 0.0)
        if grid is not None:
            grid = (grid[0], grid[1] / mass)
        return InputDistribution(0.0, (mp[0], mp[1] / mass), grid)

    def is_symmetric_two_point(self) -> bool:
        x, w = self.components()
        return (x.size == 2 and math.isclose(x[0], -x[1]) and x[0] != 0
                and math.isclose(w[0], w[1]))

    def quantile(self, u: float) -> float:
        """Inverse CDF over the sorted support (density points as atoms)."""
        x, cdf = self._inverse_cdf()
        idx = int(np.searchsorted(cdf, u, side="right"))
        return float(x[min(idx, x.size - 1)])

    def _inverse_cdf(self) -> tuple[np.ndarray, np.ndarray]:
        cached = self.__dict__.get("_icdf")
        if cached is None:
            x, w = self.components()
            order = np.argsort(x, kind="stable")
            cdf = np.cumsum(w[order])
            cached = (x[order], cdf / cdf[-1])
            object.__setattr__(self, "_icdf", cached)
        return cached


# quadrature ---------------------------------------------------------------


def log_mixture_density(w: np.ndarray, locs: np.ndarray, probs: np.ndarray,
                        sigma: float) -> np.ndarray:
    """log of sum_i probs_i * N(w; locs_i, sigma**2), evaluated stably."""
    logp = np.log(probs)
    out = np.empty(w.shape)
    step = max(1, _CHUNK // max(1, locs.size))
    const = -0.5 * math.log(2 * math.pi * sigma * sigma)
    for s in range(0, w.size, step):
        ws = w[s:s + step]
        z = logp[None, :] - 0.5 * ((ws[:, None] - locs[None, :]) / sigma) ** 2
        out[s:s + step] = logsumexp(z, axis=1) + const
    return out


def integrate_line(fn, lo: float, hi: float, sigma: float, tol: float = 1e-10,
                   max_levels: int = 14) -> float:
    """Trapezoid rule on [lo, hi], doubling the point count until successive
    estimates agree within ``tol``.  The integrands here decay like Gaussians at
    both ends, so the rule converges geometrically once the spacing resolves
    ``sigma``."""
    n = max(64, int(math.ceil((hi - lo) / (0.5 * sigma))))
    prev = None
    for _ in range(max_levels):
        w = np.linspace(lo, hi, n + 1)
        vals = fn(w)
        est = (hi - lo) / n * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
        if prev is not None and abs(est - prev) < tol:
            return float(est)
        prev = est
        n *= 2
    raise QuadratureError(f"no convergence on [{lo}, {hi}] after {max_levels} levels")


def output_entropy(dist: InputDistribution, channel: AwgnChannel,
                   tol: float = 1e-10) -> float:
    """Differential entropy h(X + N) in nats."""
    locs, probs = dist.components()
    sigma = channel.sigma
    lo, hi = locs.min() - TAIL_SIGMAS * sigma, locs.max() + TAIL_SIGMAS * sigma

    def integrand(w):
        lf = log_mixture_density(w, locs, probs, sigma)
        return -np.exp(lf) * lf

    return integrate_line(integrand, lo, hi, sigma, tol)


def mutual_information(dist: InputDistribution, channel: AwgnChannel,
                       tol: float = 1e-10) -> float:
    """I(X; X + N) in nats, clamped at zero."""
    locs, _ = dist.components()
    if locs.size == 1:
        return 0.0
    return max(0.0, output_entropy(dist, channel, tol) - channel.noise_entropy())


def mixture_divergence(p_locs, p_probs, q_locs, q_probs, sigma: float,
                       tol: float = 1e-10) -> float:
    """KL divergence between two Gaussian mixtures with common component variance."""
    lo = min(p_locs.min(), q_locs.min()) - TAIL_SIGMAS * sigma
    hi = max(p_locs.max(), q_locs.max()) + TAIL_SIGMAS * sigma

    def integrand(w):
        lp = log_mixture_density(w, p_locs, p_probs, sigma)
        lq = log_mixture_density(w, q_locs, q_probs, sigma)
        return np.exp(lp) * (lp - lq)

    return max(0.0, integrate_line(integrand, lo, hi, sigma, tol))
