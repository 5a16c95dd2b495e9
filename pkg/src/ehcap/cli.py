"""Command line: rate tables, architecture sweeps and simulation traces as CSV.

    ehcap capacity --mode ideal --ey 1 --unit bits
    ehcap capacity --mode fig2
    ehcap architectures --sweep beta1:0.05:1:20
    ehcap simulate --arch HSU --n 10000 --seed 3 --out trace.csv

Exit codes: 0 ok, 2 invalid spec, 3 solver failure, 4 infeasible energy.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import harvest as hv
from . import policy as pol
from . import sim
from .buffer import Architecture, BufferConfig, InfeasibleEnergyError
from .capacity import (AwgnChannel, ConvergenceError, InputDistribution, QuadratureError,
                       awgn_capacity, hu_capacity, hus_budget, mutual_information,
                       pe_capacity, peak_average_capacity)

EXIT_INVALID, EXIT_SOLVER, EXIT_INFEASIBLE = 2, 3, 4
MODES = ("ideal", "pe", "pe-nosleep", "peak", "hu", "fig2")
FIG2_SWEEP = "ey:0.1:10:13:log"
FIG3_SWEEP = "beta1:0.05:1:20"
FIXED_SLEEP = 0.25
POLICIES = ("gaussian", "sleep", "harvest-use", "always-sleep")


class SpecError(ValueError):
    """The command line does not describe a valid experiment."""


@dataclass(frozen=True)
class Sweep:
    var: str
    lo: float
    hi: float
    steps: int
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise SpecError("sweep bounds must be finite")
        if self.steps < 2:
            raise SpecError("a sweep needs at least 2 steps")
        if self.log and min(self.lo, self.hi) <= 0:
            raise SpecError("log sweeps need positive bounds")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)


def parse_sweep(text: str) -> Sweep:
    parts = text.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "lin")):
        raise SpecError(f"sweep {text!r} is not var:min:max:steps[:log]")
    try:
        lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise SpecError(f"sweep {text!r}: {exc}") from None
    return Sweep(parts[0], lo, hi, steps, len(parts) == 5 and parts[4] == "log")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def parse_harvest(text: str) -> hv.HarvestModel:
    """``example1``, ``const:Y``, ``chi2:S``, ``discrete:v1,v2[@p1,p2]`` or
    ``periodic:A;B`` with non-periodic phases A, B."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "example1" and not arg:
            return hv.example_one()
        if kind == "const":
            return hv.ConstantIid(float(arg))
        if kind == "chi2":
            return hv.ChiSquare1(float(arg))
        if kind == "discrete":
            vals, _, probs = arg.partition("@")
            return hv.DiscreteIid(_floats(vals), _floats(probs) if probs else None)
        if kind == "periodic":
            return hv.PeriodicMix([parse_harvest(p) for p in arg.split(";")])
    except ValueError as exc:
        raise SpecError(f"harvest {text!r}: {exc}") from None
    raise SpecError(f"unknown harvest spec {text!r}")


@dataclass
class ExperimentSpec:
    command: str
    harvest: hv.HarvestModel = field(default_factory=hv.example_one)
    sigma2: float = 1.0
    beta1: float = 1.0
    beta2: float = 0.0
    gamma: float = math.inf
    ez: float = 0.0
    power: float | None = None
    p: float = 0.0
    sweep: Sweep | None = None
    seed: int = 0
    unit: str = "nats"
    out: str | None = None
    mode: str = "ideal"
    ey: float | None = None
    peak: float | None = None
    arch: str = "HSU"
    policy: str = "gaussian"
    n: int = 10_000
    bins: int = sim.DEFAULT_BINS
    plot: str | None = None

    @property
    def channel(self) -> AwgnChannel:
        return AwgnChannel(self.sigma2)

    def mean_harvest(self) -> float:
        return self.ey if self.ey is not None else self.harvest.mean()

    def rate(self, nats: float) -> float:
        return nats / math.log(2) if self.unit == "bits" else nats


# capacity -------------------------------------------------------------------


def _capacity_point(spec: ExperimentSpec) -> tuple[float, float, float]:
    ch = spec.channel
    ey = spec.mean_harvest()
    if spec.mode == "ideal":
        return awgn_capacity(ey, ch), 0.0, 0.0
    if spec.mode in ("pe", "pe-nosleep"):
        res = pe_capacity(ey, spec.ez, ch, sleep_allowed=spec.mode == "pe")
        return res.rate, res.p_sleep, res.certificate_gap
    if spec.mode == "peak":
        if spec.peak is None:
            raise SpecError("peak mode needs --peak")
        avg = spec.power if spec.power is not None else math.inf
        res = peak_average_capacity(spec.peak, avg, ch)
        return res.rate, res.p_sleep, res.certificate_gap
    hu = hu_capacity(spec.harvest, ch)
    gap = max(r.certificate_gap for r in hu.per_value.values())
    return hu.rate, 0.0, gap


_SWEEPABLE = {"ey", "sigma2", "ez", "peak", "power"}


def _with(spec: ExperimentSpec, var: str, value: float) -> ExperimentSpec:
    if var not in _SWEEPABLE:
        raise SpecError(f"cannot sweep {var!r}; choose from {sorted(_SWEEPABLE)}")
    return ExperimentSpec(**{**spec.__dict__, var: float(value)})


def fixed_sleep_rate(ey: float, ez: float, channel: AwgnChannel,
                     p: float = FIXED_SLEEP) -> float:
    """ON-OFF rate with sleep probability ``p`` and a Gaussian on-law spending the budget."""
    var = ey / (1.0 - p) - ez
    if var <= 0:
        return 0.0
    return mutual_information(InputDistribution.gaussian(var, zero_atom=p), channel)


def cmd_capacity(spec: ExperimentSpec) -> tuple[list[str], list[list[float]]]:
    if spec.mode == "fig2":
        sweep = spec.sweep or parse_sweep(FIG2_SWEEP)
        if sweep.var != "ey":
            raise SpecError("the fig2 mode sweeps ey")
        ch = spec.channel
        rows = []
        for ey in sweep.values():
            opt = pe_capacity(ey, spec.ez, ch)
            rows.append([ey, spec.rate(awgn_capacity(ey - spec.ez, ch)),
                         spec.rate(fixed_sleep_rate(ey, spec.ez, ch)),
                         spec.rate(opt.rate), opt.p_sleep, opt.certificate_gap])
        return ["ey", "rate_p0", "rate_p025", "rate_opt", "p_sleep", "certificate_gap"], rows
    if spec.sweep is None:
        points = [(spec.mean_harvest() if spec.mode != "peak" else spec.peak, spec)]
    else:
        points = [(v, _with(spec, spec.sweep.var, v)) for v in spec.sweep.values()]
    rows = []
    for value, point in points:
        rate, p_sleep, gap = _capacity_point(point)
        rows.append([value, spec.rate(rate), p_sleep, gap])
    return ["parameter", "rate", "p_sleep", "certificate_gap"], rows


def cmd_architectures(spec: ExperimentSpec) -> tuple[list[str], list[list[float]]]:
    sweep = spec.sweep or parse_sweep(FIG3_SWEEP)
    if sweep.var != "beta1":
        raise SpecError("architectures sweeps beta1")
    if not (0 < min(sweep.lo, sweep.hi) and max(sweep.lo, sweep.hi) <= 1):
        raise SpecError("beta1 must lie in (0, 1]")
    ch = spec.channel
    ey = spec.harvest.mean()
    r_hu = hu_capacity(spec.harvest, ch).rate
    rows = []
    for b1 in sweep.values():
        r_hsu = awgn_capacity(b1 * ey - spec.beta2, ch)
        r_hus = awgn_capacity(hus_budget(spec.harvest, b1, spec.beta2), ch)
        rows.append([b1, spec.rate(r_hu), spec.rate(r_hsu), spec.rate(r_hus)])
    return ["beta1", "rate_hu", "rate_hsu", "rate_hus"], rows


# simulate -------------------------------------------------------------------


def build_policy(spec: ExperimentSpec) -> pol.Policy:
    ey = spec.harvest.mean()
    if spec.policy == "always-sleep":
        return pol.SleepWake(1.0, 1.0)
    if spec.policy == "harvest-use":
        return pol.HarvestUse()
    power = spec.power
    if power is None:
        arch = Architecture(spec.arch)
        if spec.policy == "sleep":
            power = pol.budget("pe", ey=ey / (1.0 - spec.p), ez=spec.ez)
        elif arch is Architecture.HUS:
            power = pol.budget("hus", c=hus_budget(spec.harvest, spec.beta1, spec.beta2))
        elif arch is Architecture.HSU:
            power = pol.budget("hsu", ey=ey, beta1=spec.beta1, beta2=spec.beta2)
        else:
            power = pol.budget("ideal", ey=ey)
    if spec.policy == "sleep":
        return pol.SleepWake(spec.p, power, hv.ConstantIid(spec.ez))
    return pol.TruncatedGaussian(power, spec.gamma)


def cmd_simulate(spec: ExperimentSpec, trace_out) -> tuple[list[str], list[list[float]]]:
    cfg = BufferConfig(Architecture(spec.arch), spec.beta1, spec.beta2, spec.gamma)
    trace = sim.run(spec.harvest, cfg, build_policy(spec), spec.channel, spec.n, spec.seed)
    sim.write_trace(trace, trace_out)
    rep = sim.report(trace, spec.channel, spec.bins)
    row = rep.row()
    row["empirical_rate"] = spec.rate(row["empirical_rate"])
    return list(row), [list(row.values())]


# plumbing -------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, (bool, int, np.integer)):
        return str(int(v))
    return format(float(v), ".9g")


def write_rows(header: Sequence[str], rows, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def plot_script(csv_path: str, header: Sequence[str], unit: str) -> str:
    """A gnuplot script drawing every column of ``csv_path`` against the first."""
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             f"set xlabel '{header[0]}'", f"set ylabel 'rate ({unit})'",
             "set grid"]
    curves = [f"'{csv_path}' using 1:{i + 1} with linespoints"
              for i, name in enumerate(header) if i and name.startswith("rate")]
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sigma2", type=float, default=1.0)
    common.add_argument("--harvest", default="example1", help="example1 | const:Y | chi2:S | "
                        "discrete:v1,v2[@p1,p2] | periodic:A;B")
    common.add_argument("--beta1", type=float, default=1.0)
    common.add_argument("--beta2", type=float, default=0.0)
    common.add_argument("--gamma", type=float, default=math.inf)
    common.add_argument("--ez", type=float, default=None)
    common.add_argument("--sweep", default=None, help="var:min:max:steps[:log]")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--unit", choices=("nats", "bits"), default="nats")
    common.add_argument("--out", default=None, help="CSV path (default stdout)")

    parser = argparse.ArgumentParser(prog="ehcap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    cap = sub.add_parser("capacity", parents=[common], help="capacity tables")
    cap.add_argument("--mode", choices=MODES, default="ideal")
    cap.add_argument("--ey", type=float, default=None, help="E[Y]; overrides the harvest mean")
    cap.add_argument("--peak", type=float, default=None)
    cap.add_argument("--power", type=float, default=None, help="average power for --mode peak")
    cap.add_argument("--plot", default=None, help="also write a gnuplot script here")
    arc = sub.add_parser("architectures", parents=[common], help="HU/HSU/HUS rates over beta1")
    arc.add_argument("--plot", default=None, help="also write a gnuplot script here")
    simp = sub.add_parser("simulate", parents=[common], help="Monte-Carlo trace")
    simp.add_argument("--arch", choices=[a.value for a in Architecture], default="HSU")
    simp.add_argument("--policy", choices=POLICIES, default="gaussian")
    simp.add_argument("--power", type=float, default=None,
                      help="signaling variance (default: the architecture budget)")
    simp.add_argument("--p", type=float, default=0.0, help="sleep probability")
    simp.add_argument("--n", type=int, default=10_000)
    simp.add_argument("--bins", type=int, default=sim.DEFAULT_BINS)
    simp.add_argument("--summary", default=None, help="summary CSV path (default stdout)")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    kw = {k: v for k, v in vars(args).items()
          if k in ExperimentSpec.__dataclass_fields__ and v is not None}
    kw["harvest"] = parse_harvest(args.harvest)
    if args.sweep is not None:
        kw["sweep"] = parse_sweep(args.sweep)
    if args.ez is None:
        kw["ez"] = 1.0 if getattr(args, "mode", None) == "fig2" else 0.0
    spec = ExperimentSpec(**kw)
    if spec.command == "simulate" and spec.n < 1:
        raise SpecError("--n must be positive")
    if not 0.0 <= spec.p <= 1.0:
        raise SpecError("--p must lie in [0, 1]")
    return spec


def _open(path: str | None):
    return open(path, "w", newline="", encoding="utf-8") if path else None


def run_command(spec: ExperimentSpec, args: argparse.Namespace) -> None:
    if spec.command == "simulate":
        fh = _open(spec.out)
        try:
            header, rows = cmd_simulate(spec, fh or sys.stdout)
        finally:
            if fh:
                fh.close()
        sfh = _open(args.summary)
        write_rows(header, rows, sfh or (sys.stdout if fh else sys.stderr))
        if sfh:
            sfh.close()
        return
    cmd = cmd_capacity if spec.command == "capacity" else cmd_architectures
    header, rows = cmd(spec)
    fh = _open(spec.out)
    write_rows(header, rows, fh or sys.stdout)
    if fh:
        fh.close()
    if spec.plot:
        if not spec.out:
            raise SpecError("--plot needs --out")
        with open(spec.plot, "w", encoding="utf-8") as f:
            f.write(plot_script(spec.out, header, spec.unit))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
        run_command(spec, args)
    except (SpecError, ValueError) as exc:
        print(f"ehcap: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, QuadratureError) as exc:
        print(f"ehcap: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except InfeasibleEnergyError as exc:
        print(f"ehcap: infeasible energy: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return 0


if __name__ == "__main__":
    sys.exit(main())
