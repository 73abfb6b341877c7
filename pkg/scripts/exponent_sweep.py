"""Rate bounds for a formula over a grid of (a_exp, b_exp), marking where the verdict is certified."""

import argparse

from qbfchannel.analysis import IndeterminateError, decide_gap, recommended_exponents
from qbfchannel.policy import optimal_bad_probability
from qbfchannel.qbf import parse_qdimacs
from qbfchannel.reduction import ChannelParams, build_channel

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("--max-a", type=int, default=12)
    ap.add_argument("--max-gap", type=int, default=16)
    args = ap.parse_args()

    with open(args.input) as fh:
        f = parse_qdimacs(fh.read())
    solved = optimal_bad_probability(build_channel(f))
    print(f"{f}  beta_min={solved[0]}  recommended={recommended_exponents(f.n, f.m)}")
    print(f"{'a':>3} {'b':>3} {'lower':>10} {'upper':>10} verdict")
    for a in range(2, args.max_a + 1, 2):
        for gap in range(2, args.max_gap + 1, 2):
            spec = build_channel(f, ChannelParams(a, a + gap))
            try:
                d = decide_gap(spec, solved=solved)
                lo, up, v = d.bounds.lower, d.bounds.upper, d.verdict.value
            except IndeterminateError as e:
                lo, up, v = e.bounds.lower, e.bounds.upper, "-"
            print(f"{a:>3} {a + gap:>3} {float(lo):>10.6f} {float(up):>10.6f} {v}")
