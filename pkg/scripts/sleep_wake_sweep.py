"""Rates of sleep-wake signaling against harvest energy, with unit processing energy.

Writes results/sleep_wake.csv (and a gnuplot script) with the no-sleep rate, the
rate of a fixed 25% sleep probability and the optimal rate with its sleep probability.
"""

import argparse
from pathlib import Path

from ehcap import cli

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--sweep", default="ey:0.1:50:16:log")
parser.add_argument("--outdir", default="results")
args = parser.parse_args()

out = Path(args.outdir)
out.mkdir(exist_ok=True)
raise SystemExit(cli.main(["capacity", "--mode", "fig2", "--sweep", args.sweep,
                           "--out", str(out / "sleep_wake.csv"),
                           "--plot", str(out / "sleep_wake.gp")]))
