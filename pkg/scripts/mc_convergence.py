"""Monte Carlo good-state frequency against the exact renewal-reward occupancy.

Prints the absolute error and the regenerative 99% halfwidth as the run grows.
"""

import argparse

from qbfchannel.analysis import cycle_stats
from qbfchannel.policy import optimal_bad_probability
from qbfchannel.qbf import parse_qdimacs
from qbfchannel.reduction import ChannelParams, build_channel
from qbfchannel.sim import monte_carlo

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("--a-exp", type=int, default=6)
    ap.add_argument("--b-exp", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-steps", type=int, default=10**6)
    args = ap.parse_args()

    with open(args.input) as fh:
        f = parse_qdimacs(fh.read())
    spec = build_channel(f, ChannelParams(args.a_exp, args.b_exp))
    beta, pol = optimal_bad_probability(spec)
    exact = float(cycle_stats(f.n, f.m, beta, spec.params).occupancy)
    print(f"beta_min={beta} exact occupancy={exact:.6f}")
    print(f"{'steps':>10} {'good_freq':>10} {'abs_err':>9} {'hw99':>9} {'bad_pass':>9}")
    steps = 10**4
    while steps <= args.max_steps:
        r = monte_carlo(spec, pol, steps, args.seed)
        print(f"{steps:>10} {r.good_frequency:>10.5f} {abs(r.good_frequency - exact):>9.5f} "
              f"{r.confidence_halfwidth:>9.5f} {r.bad_pass_fraction:>9.4f}")
        steps *= 10
