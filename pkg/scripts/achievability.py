"""Monte-Carlo check of truncated-Gaussian signaling on an ideal buffer.

For several seeds and back-offs, reports feasibility, truncation rate, buffer
drift and the empirical rate next to the capacity for the four-level harvest.
"""

import argparse

from ehcap import policy, sim
from ehcap.buffer import BufferConfig
from ehcap.capacity import AwgnChannel, awgn_capacity
from ehcap.harvest import example_one

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--n", type=int, default=200_000)
parser.add_argument("--seeds", type=int, default=3)
args = parser.parse_args()

ch, model = AwgnChannel(1.0), example_one()
ey = model.mean()
print(f"capacity {awgn_capacity(ey, ch):.6f} nats")
print("eps_rel,seed,feasible,truncation_rate,drift,mean_t,empirical_rate")
for eps in (1e-3, 1e-2, 0.1, -0.1):
    power = ey * (1 - eps)
    for seed in range(args.seeds):
        tr = sim.run(model, BufferConfig(), policy.TruncatedGaussian(power), ch, args.n, seed)
        r = sim.report(tr, ch)
        print(f"{eps:g},{seed},{int(r.feasible)},{r.truncation_rate:.5f},{r.drift:.3e},"
              f"{r.mean_t:.5f},{r.empirical_rate:.5f}")
