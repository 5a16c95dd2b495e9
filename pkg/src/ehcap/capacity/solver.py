"""Cost-constrained capacity of the AWGN channel over a fixed amplitude grid.

Maximizes ``I(X;W)`` over laws ``r`` on grid points ``x_j`` subject to
``sum_j r_j c_j <= budget``.  Blahut-Arimoto sweeps (with the Lagrange
multiplier re-solved every sweep so each iterate is feasible) give a warm start;
a log-barrier Newton method then finishes the concave program.  Every solution
carries a Kuhn-Tucker certificate::

    gap = min_{lam >= 0} max_j [ i(x_j) - lam * (c_j - budget) ] - I(r)

which upper-bounds the distance to the grid optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .distribution import TAIL_SIGMAS

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000
BA_SWEEPS = 200
_R_FLOOR = 1e-300


class ConvergenceError(RuntimeError):
    """The solver stopped before its certificate reached the requested tolerance."""


@dataclass
class GridSolution:
    x: np.ndarray
    r: np.ndarray
    rate: float
    info_density: np.ndarray
    multiplier: float
    gap: float
    iterations: int


class _Channel:
    """Trapezoid discretization of the AWGN transition density on an output grid."""

    def __init__(self, x: np.ndarray, sigma2: float, step_frac: float = 0.25):
        sigma = math.sqrt(sigma2)
        lo = x.min() - TAIL_SIGMAS * sigma
        hi = x.max() + TAIL_SIGMAS * sigma
        k = int(math.ceil((hi - lo) / (step_frac * sigma))) + 1
        w = np.linspace(lo, hi, k)
        self.h = w[1] - w[0]
        logphi = (-0.5 * (w[None, :] - x[:, None]) ** 2 / sigma2
                  - 0.5 * math.log(2 * math.pi * sigma2))
        self.phi = self.h * np.exp(logphi)
        # row-wise  integral of phi * log(phi): -h(N) up to quadrature error
        self.neg_noise_entropy = (self.phi * logphi).sum(axis=1)

    def output_mass(self, r: np.ndarray) -> np.ndarray:
        return np.maximum(r @ self.phi, _R_FLOOR)

    def info_density(self, r: np.ndarray) -> np.ndarray:
        """i(x_j) = D(p(w|x_j) || p_r(w)) for every grid point."""
        q = self.output_mass(r)
        return self.neg_noise_entropy - self.phi @ np.log(q / self.h)

    def rate(self, r: np.ndarray) -> float:
        q = self.output_mass(r)
        return float(r @ self.neg_noise_entropy - q @ np.log(q / self.h))


def _tilt(z: np.ndarray, lam: float, cost: np.ndarray) -> np.ndarray:
    z = z - lam * cost
    z -= z.max()
    r = np.exp(z)
    return r / r.sum()


def _feasible_tilt(z: np.ndarray, cost: np.ndarray, budget: float | None):
    """Smallest lam >= 0 whose tilt of ``exp(z)`` meets the budget.

    E_lam[c] is decreasing in lam, so a bracket is found by doubling and then
    narrowed by bisection with Newton steps (derivative = -Var_lam[c]).
    """
    r = _tilt(z, 0.0, cost)
    if budget is None or r @ cost <= budget:
        return 0.0, r
    lo, hi = 0.0, 1.0
    while _tilt(z, hi, cost) @ cost > budget:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConvergenceError("could not bracket the Lagrange multiplier")
    lam = 0.5 * (lo + hi)
    for _ in range(200):
        r = _tilt(z, lam, cost)
        mean = r @ cost
        excess = mean - budget
        if excess > 0:
            lo = lam
        else:
            hi = lam
        if abs(excess) <= 1e-14 * max(1.0, budget) or hi - lo <= 1e-15 * hi:
            break
        var = r @ (cost - mean) ** 2
        nxt = lam + excess / var if var > 0 else 0.5 * (lo + hi)
        lam = nxt if lo < nxt < hi else 0.5 * (lo + hi)
    if r @ cost > budget:
        r = _tilt(z, hi, cost)
        lam = hi
    return lam, r


def certificate(info: np.ndarray, rate: float, cost: np.ndarray,
                budget: float | None) -> tuple[float, float]:
    """Return ``(gap, lam)`` minimizing the dual bound over lam >= 0.

    ``max_j(i_j - lam*c_j) + lam*budget`` is convex and piecewise linear in
    lam with subgradient ``budget - c_{argmax}``; bisect on its sign.
    """
    if budget is None:
        return float(info.max() - rate), 0.0

    def slope(lam):
        return budget - cost[np.argmax(info - lam * cost)]

    def bound(lam):
        return float(np.max(info - lam * cost) + lam * budget)

    if slope(0.0) >= 0:
        return bound(0.0) - rate, 0.0
    lo, hi = 0.0, 1.0
    while slope(hi) < 0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * hi:
            break
    best = min((bound(lo), lo), (bound(hi), hi))
    return best[0] - rate, best[1]


def _start(cost: np.ndarray, budget: float | None) -> np.ndarray:
    """Strictly positive feasible law: uniform, pulled toward the cheapest point."""
    r = np.full(cost.size, 1.0 / cost.size)
    if budget is None:
        return r
    j = int(np.argmin(cost))
    # aim strictly inside the budget so the barrier starts finite
    target = budget - 1e-3 * (budget - cost[j])
    mean = r @ cost
    if mean > target:
        theta = (target - cost[j]) / (mean - cost[j])
        r *= theta
        r[j] += 1.0 - theta
    return r


def _newton_polish(ch: _Channel, cost: np.ndarray, budget: float | None,
                   r: np.ndarray, tol: float, max_steps: int) -> tuple[np.ndarray, int]:
    """Log-barrier Newton method for max I(r) s.t. sum r = 1, c.r <= budget, r >= 0."""
    n = r.size
    r = _start_from(r, cost, budget)
    t = n / 1e-3
    steps = 0
    ones = np.ones(n)

    def barrier_obj(rr, tt):
        val = ch.rate(rr) + np.log(rr).sum() / tt
        if budget is not None:
            val += math.log(budget - rr @ cost) / tt
        return -val

    while True:
        for _ in range(100):
            q = ch.output_mass(r)
            info = ch.neg_noise_entropy - ch.phi @ np.log(q / ch.h)
            grad = -(info - 1.0) - 1.0 / (t * r)
            hess = (ch.phi / q) @ ch.phi.T
            hess[np.diag_indices(n)] += 1.0 / (t * r * r)
            if budget is not None:
                s = budget - r @ cost
                grad += cost / (t * s)
                hess += np.outer(cost, cost) / (t * s * s)
            try:
                fac = sla.cho_factor(hess)
                a = sla.cho_solve(fac, grad)
                b = sla.cho_solve(fac, ones)
            except np.linalg.LinAlgError:
                a = np.linalg.solve(hess, grad)
                b = np.linalg.solve(hess, ones)
            d = -(a - (a.sum() / b.sum()) * b)
            decrement = -(grad @ d)
            steps += 1
            if decrement < 2e-12 or steps >= max_steps:
                break
            step = 1.0
            neg = d < 0
            if neg.any():
                step = min(step, 0.99 * float(np.min(-r[neg] / d[neg])))
            if budget is not None and d @ cost > 0:
                step = min(step, 0.99 * (budget - r @ cost) / (d @ cost))
            f0 = barrier_obj(r, t)
            while barrier_obj(r + step * d, t) > f0 - 0.25 * step * decrement:
                step *= 0.5
                if step < 1e-14:
                    break
            r = r + step * d
        if n / t < 1e-3 * tol or steps >= max_steps:
            break
        t *= 10.0
    r = np.maximum(r, 0.0)
    return r / r.sum(), steps


def _start_from(r: np.ndarray, cost: np.ndarray, budget: float | None) -> np.ndarray:
    r = 0.999 * r + 0.001 / r.size
    if budget is None:
        return r
    j = int(np.argmin(cost))
    target = budget - 1e-6 * (budget - cost[j])
    mean = r @ cost
    if mean > target:
        theta = (target - cost[j]) / (mean - cost[j])
        r = theta * r
        r[j] += 1.0 - theta
    return r


def solve_grid(x, cost, budget: float | None, sigma2: float, *,
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
               ba_sweeps: int = BA_SWEEPS) -> GridSolution:
    """Capacity-achieving law on the grid ``x`` under ``E[cost] <= budget``.

    ``budget=None`` (or any budget above the largest cost) drops the constraint.
    Raises :class:`ConvergenceError` if the certificate gap is still above
    ``tol`` after ``max_iter`` iterations (BA sweeps plus Newton steps).
    """
    x = np.asarray(x, dtype=float)
    cost = np.asarray(cost, dtype=float)
    if budget is not None:
        if budget < cost.min():
            raise ValueError("budget is below the cheapest grid point")
        if budget >= cost.max():
            budget = None
    if budget is not None and budget <= cost.min() * (1 + 1e-15) + 1e-300:
        cheapest = np.flatnonzero(cost == cost.min())
        r = np.zeros(x.size)
        r[cheapest] = 1.0 / cheapest.size
        ch = _Channel(x, sigma2)
        info = ch.info_density(r)
        rate = max(ch.rate(r), 0.0) if cheapest.size > 1 else 0.0
        gap, lam = certificate(info, rate, cost, budget)
        return GridSolution(x, r, rate, info, lam, max(gap, 0.0), 0)

    ch = _Channel(x, sigma2)
    r = _start(cost, budget)
    iterations = 0
    gap = math.inf
    info = ch.info_density(r)
    rate = float(r @ info)
    for _ in range(min(ba_sweeps, max_iter)):
        info = ch.info_density(r)
        rate = float(r @ info)
        gap, lam = certificate(info, rate, cost, budget)
        if gap <= tol:
            break
        _, r = _feasible_tilt(np.log(np.maximum(r, _R_FLOOR)) + info, cost, budget)
        iterations += 1
    if gap > tol and iterations < max_iter:
        r, steps = _newton_polish(ch, cost, budget, r, tol, max_iter - iterations)
        iterations += steps
        if budget is not None and r @ cost > budget:
            # round-off past the constraint: pull back toward the cheapest point
            j = int(np.argmin(cost))
            theta = (budget - cost[j]) / (r @ cost - cost[j])
            r = theta * r
            r[j] += 1.0 - theta
        info = ch.info_density(r)
        rate = float(r @ info)
        gap, lam = certificate(info, rate, cost, budget)
    if gap > tol:
        raise ConvergenceError(
            f"certificate gap {gap:.3g} above tolerance {tol:.3g} after {iterations} iterations")
    return GridSolution(x, r, max(rate, 0.0), info, lam, max(gap, 0.0), iterations)


def consolidate(x: np.ndarray, r: np.ndarray, threshold: float = 1e-6):
    """Merge runs of adjacent grid atoms above ``threshold`` into their centroids.

    Runs are split at interior local minima so separate peaks stay separate;
    grid mass below the threshold joins the nearest run.  Centroid merging keeps
    the mean of each run and cannot raise its second moment.
    """
    heavy = np.flatnonzero(r > threshold)
    if heavy.size == 0:
        return x[[int(np.argmax(r))]], np.ones(1)
    labels = np.full(x.size, -1)
    run = 0
    for k, j in enumerate(heavy):
        if k > 0:
            prev = heavy[k - 1]
            split = j != prev + 1
            if not split and 0 < prev and j < x.size:
                # prev is a strict local minimum inside a run
                split = r[prev] < r[prev - 1] and r[prev] < r[j] and labels[prev - 1] == run
            if split:
                run += 1
        labels[j] = run
    light = np.flatnonzero(labels < 0)
    if light.size:
        nearest = np.abs(x[light][:, None] - x[heavy][None, :]).argmin(axis=1)
        labels[light] = labels[heavy[nearest]]
    mass = np.bincount(labels, weights=r)
    centroid = np.bincount(labels, weights=r * x) / mass
    return centroid, mass / mass.sum()
