"""Monte-Carlo runs of harvest, buffer, policy and channel, slot by slot.

All randomness is pre-drawn from counter-based streams, so a trace is a pure
function of its inputs and seed; only the buffer recursion runs as a loop.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import rng
from .buffer import FEASIBILITY_TOL, BufferConfig, _available, next_energy
from .capacity.distribution import AwgnChannel, InputDistribution, mutual_information
from .harvest import HarvestModel, sample_path
from .policy import Policy, SleepWake, SlotDraw

DEFAULT_BINS = 201
TRACE_COLUMNS = ("k", "e", "y", "t", "x", "w", "slept", "truncated")


@dataclass
class SimTrace:
    """Per-slot record; ``e[k]`` is the stored energy at the start of slot k."""

    e: np.ndarray
    y: np.ndarray
    t: np.ndarray
    x: np.ndarray
    w: np.ndarray
    slept: np.ndarray
    truncated: np.ndarray
    avail: np.ndarray

    def __len__(self) -> int:
        return self.e.size


@dataclass
class SimReport:
    mean_t: float
    drift: float
    truncation_rate: float
    empirical_rate: float
    feasible: bool

    def row(self) -> dict:
        return {"mean_t": self.mean_t, "drift": self.drift,
                "truncation_rate": self.truncation_rate,
                "empirical_rate": self.empirical_rate, "feasible": int(self.feasible)}


def run(harvest: HarvestModel, cfg: BufferConfig, policy: Policy, channel: AwgnChannel,
        n: int, seed: int, e0: float = 0.0) -> SimTrace:
    if n < 1:
        raise ValueError("n must be positive")
    ys = sample_path(harvest, n, seed)
    gs = rng.normals(seed, rng.SYMBOL, n)
    us = rng.uniforms(seed, rng.SLEEP, n)
    if isinstance(policy, SleepWake):
        zs = sample_path(policy.z_model, n, seed, stream=rng.PROCESSING)
    else:
        zs = np.zeros(n)
    noise = channel.sigma * rng.normals(seed, rng.NOISE, n)

    e_out = np.empty(n)
    avail_out = np.empty(n)
    t_out = np.empty(n)
    x_out = np.empty(n)
    slept = np.zeros(n, dtype=bool)
    trunc = np.zeros(n, dtype=bool)
    arch = cfg.architecture
    step = policy.next_symbol
    e = float(e0)
    for k, (y, g, u, z) in enumerate(zip(ys.tolist(), gs.tolist(), us.tolist(), zs.tolist())):
        avail = _available(arch, e, y)
        sym = step(avail, y, SlotDraw(g, u, z))
        e_out[k] = e
        avail_out[k] = avail
        t_out[k] = sym.t
        x_out[k] = sym.x
        slept[k] = sym.slept
        trunc[k] = sym.truncated
        e = next_energy(cfg, e, sym.t, y)
    return SimTrace(e_out, ys, t_out, x_out, x_out + noise, slept, trunc, avail_out)


def histogram_law(x: np.ndarray, bins: int = DEFAULT_BINS) -> InputDistribution:
    """Equal-width histogram of ``x`` as mass points at the bin centres."""
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return InputDistribution.point_masses([lo], [1.0])
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    keep = counts > 0
    centres = 0.5 * (edges[:-1] + edges[1:])
    return InputDistribution.point_masses(centres[keep], counts[keep])


def report(trace: SimTrace, channel: AwgnChannel, bins: int = DEFAULT_BINS) -> SimReport:
    """Statistics over the second half of the trace."""
    n = len(trace)
    if n == 0:
        raise ValueError("empty trace")
    half = slice(n // 2, n)
    e = trace.e[half]
    if e.size > 1:
        k = np.arange(e.size, dtype=float)
        drift = float(np.polyfit(k, e, 1)[0])
    else:
        drift = 0.0
    feasible = bool(np.all(trace.t <= trace.avail + FEASIBILITY_TOL))
    rate = mutual_information(histogram_law(trace.x[half], bins), channel)
    return SimReport(float(trace.t[half].mean()), drift,
                     float(trace.truncated[half].mean()), rate, feasible)


def _fmt(v: float) -> str:
    return format(v, ".9g")


def write_trace(trace: SimTrace, out: io.TextIOBase) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    cols = (trace.e, trace.y, trace.t, trace.x, trace.w)
    for k in range(len(trace)):
        writer.writerow([k, *(_fmt(float(c[k])) for c in cols),
                         int(trace.slept[k]), int(trace.truncated[k])])

