"""HU, HSU and HUS rates for the four-level harvest as storage efficiency varies.

Writes results/architectures.csv and prints the efficiency at which storing
(HSU) starts to beat using the harvest at once (HU).
"""

import argparse
from pathlib import Path

from scipy import optimize

from ehcap import cli
from ehcap.capacity import AwgnChannel, achievable_rate
from ehcap.harvest import example_one

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--sweep", default="beta1:0.05:1:20")
parser.add_argument("--outdir", default="results")
args = parser.parse_args()

out = Path(args.outdir)
out.mkdir(exist_ok=True)
code = cli.main(["architectures", "--sweep", args.sweep,
                 "--out", str(out / "architectures.csv"), "--plot", str(out / "architectures.gp")])

ch, model = AwgnChannel(1.0), example_one()
r_hu = achievable_rate("hu", model, ch)
beta_star = optimize.brentq(lambda b: achievable_rate("hsu", model, ch, beta1=b) - r_hu, 0.05, 1.0)
print(f"HU rate {r_hu:.6f} nats; HSU overtakes HU at beta1 = {beta_star:.4f}")
raise SystemExit(code)
