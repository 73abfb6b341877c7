"""Exhaustive sweep over all formulas with n <= 3, m <= 2; prints agreement per prefix."""

import argparse
import time

from qbfchannel.corpus import run_corpus, summary_table
from qbfchannel.reduction import ChannelParams

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--max-m", type=int, default=2)
    ap.add_argument("--a-exp", type=int, default=20)
    ap.add_argument("--b-exp", type=int, default=40)
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = run_corpus(args.max_n, args.max_m, ChannelParams(args.a_exp, args.b_exp), not args.no_oracle)
    print(summary_table(rows))
    false_rows = [r for r in rows if not r.truth]
    slack = min(r.beta_min * r.formula.m * 2**r.formula.n for r in false_rows)
    print(f"min beta_min * m * 2^n over false formulas: {slack}")
    print(f"{time.perf_counter() - t0:.1f}s")
