"""Command-line front end: build, solve, decide, simulate, trace, corpus.

Exit codes: 0 success, 2 input/config error, 3 indeterminate analysis.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import analysis, sim
from .channel import ChannelSim, dump_trajectory
from .corpus import run_corpus, summary_table
from .policy import optimal_bad_probability, pass_bad_probability
from .qbf import QdimacsError, parse_qdimacs
from .reduction import ChannelParams, build_channel, expanded_json

SEED_ENV = "QBFCHAN_SEED"


class ConfigError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from None


def _params(args, default_a: int, default_b: int) -> ChannelParams:
    a = default_a if args.a_exp is None else args.a_exp
    b = default_b if args.b_exp is None else args.b_exp
    try:
        return ChannelParams(a, b, getattr(args, "leak_exp", None))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _spec(args, defaults=(20, 40)):
    f = parse_qdimacs(_read(args.input))
    return f, build_channel(f, _params(args, *defaults))


def _emit(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def cmd_build(args, out) -> int:
    _, spec = _spec(args)
    _emit(expanded_json(spec) if args.expanded else spec.to_json(), out)
    return 0


def cmd_solve(args, out) -> int:
    _, spec = _spec(args)
    beta, pol = optimal_bad_probability(spec)
    pa = pass_bad_probability(spec, pol)
    if args.format == "csv":
        out.write(pa.to_csv())
    else:
        _emit(
            {
                "schema": "qbfchannel.pass/1",
                "beta_min": f"{beta.numerator}/{beta.denominator}",
                "policy": pol.to_json(),
                "scenarios": [
                    {"clause_row": i, "universals": "".join("T" if b else "F" for b in u), "final_state": str(s)}
                    for (i, u), s in pa.scenario_table.items()
                ],
            },
            out,
        )
    return 0


def cmd_decide(args, out) -> int:
    _, spec = _spec(args)
    try:
        dec = analysis.decide_gap(spec, Fraction(args.low), Fraction(args.high))
    except analysis.IndeterminateError as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        _emit(
            {
                "schema": analysis.GAPDECISION_SCHEMA,
                "verdict": "Indeterminate",
                "lower_approx": float(exc.bounds.lower),
                "upper_approx": float(exc.bounds.upper),
                "recommended_exponents": list(exc.hint),
            },
            out,
        )
        return 3
    if args.format == "text":
        b = dec.bounds
        out.write(f"{dec.verdict.value} lower={float(b.lower):.8g} upper={float(b.upper):.8g} beta_min={b.stats.beta}\n")
    else:
        _emit(dec.to_json(), out)
    return 0


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


def cmd_simulate(args, out) -> int:
    if args.steps < 1:
        raise ConfigError("steps must be >= 1")
    _, spec = _spec(args, (sim.MC_A_EXP, sim.MC_B_EXP))
    _, pol = optimal_bad_probability(spec.with_params(ChannelParams(spec.params.a_exp, spec.params.b_exp)))
    seed = _seed(args)
    if args.relay:
        bits = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed).spawn(1)[0])).integers(
            0, 2, size=args.steps
        )
        rep = sim.relay_bits(spec, pol, bits.tolist(), args.steps, seed)
        _emit(rep.to_json(), out)
        return 0
    if args.replicas > 1:
        rep = sim.monte_carlo_replicas(spec, pol, args.steps, seed, args.replicas)
    else:
        rep = sim.monte_carlo(spec, pol, args.steps, seed)
    if args.format == "csv":
        out.write(rep.cycles_csv())
    else:
        _emit(rep.to_json(), out)
    return 0


def cmd_trace(args, out) -> int:
    _, spec = _spec(args, (sim.MC_A_EXP, sim.MC_B_EXP))
    _, pol = optimal_bad_probability(spec.with_params(ChannelParams(spec.params.a_exp, spec.params.b_exp)))
    chan = ChannelSim(spec, _seed(args), record=True)
    for _ in range(args.passes):
        chan.run_pass(pol)
        chan.reset()
    out.write(dump_trajectory(chan.log))
    return 0


def cmd_corpus(args, out) -> int:
    rows = run_corpus(args.max_n, args.max_m, _params(args, 20, 40), brute_force=not args.no_oracle)
    out.write(summary_table(rows) + "\n")
    return 0 if all(r.agrees for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qbfchannel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="QDIMACS file, or - for stdin")
        p.add_argument("--a-exp", type=int, help="p = 2^-a_exp")
        p.add_argument("--b-exp", type=int, help="q = 2^-b_exp")
        return p

    p = common(sub.add_parser("build", help="emit the channel gadget as JSON"))
    p.add_argument("--expanded", action="store_true", help="list every (state, decision) -> distribution")
    p.add_argument("--leak-exp", type=int)
    p.set_defaults(func=cmd_build)

    p = common(sub.add_parser("solve", help="optimal policy and its pass analysis"))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("decide", help="high/low capacity verdict with certificate"))
    p.add_argument("--low", default="1/5", help="upper-bound threshold (default 1/5)")
    p.add_argument("--high", default="4/5", help="lower-bound threshold (default 4/5)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_decide)

    p = common(sub.add_parser("simulate", help="Monte Carlo occupancy or bit relay (defaults a=6, b=12)"))
    p.add_argument("--relay", action="store_true")
    p.add_argument("--steps", type=int, default=10**6)
    p.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV} or 0")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--leak-exp", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("trace", help="tab-separated trajectory of whole passes"))
    p.add_argument("--seed", type=int)
    p.add_argument("--passes", type=int, default=1)
    p.set_defaults(func=cmd_trace)

    p = common(sub.add_parser("corpus", help="exhaustive truth-vs-verdict sweep"), with_input=False)
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--max-m", type=int, default=2)
    p.add_argument("--no-oracle", action="store_true", help="skip brute-force policy enumeration")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (QdimacsError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
