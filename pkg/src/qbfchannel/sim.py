"""Monte Carlo checks against the exact analysis, and the bit-relay scheme."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .channel import ChannelInput, ChannelSim, decision_needed
from .reduction import ABAD, AGOOD, S0, ChannelSpec, Decision, Label

MC_SCHEMA = "qbfchannel.montecarlo/1"
RELAY_SCHEMA = "qbfchannel.relay/1"

MC_A_EXP = 6
MC_B_EXP = 12

Z99 = 2.5758293035489004


class Cycle(NamedTuple):
    index: int
    length: int
    good: int
    bad_pass: bool


@dataclass
class MonteCarloReport:
    steps: int
    good_frequency: float
    bad_frequency: float
    passes: int
    bad_pass_fraction: float
    seed: int
    confidence_halfwidth: float
    cycles: List[Cycle] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("cycles")
        d["completed_cycles"] = len(self.cycles)
        return {"schema": MC_SCHEMA, **d}

    def cycles_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "length", "good_dwell", "outcome"])
        for c in self.cycles:
            w.writerow([c.index, c.length, c.good, "bad" if c.bad_pass else "good"])
        return buf.getvalue()


@dataclass
class RelayReport:
    steps: int
    bits_offered: int
    bits_delivered: int
    bit_errors: int
    good_steps: int
    empirical_rate: float
    seed: int

    def to_json(self) -> dict:
        return {"schema": RELAY_SCHEMA, **asdict(self)}


def _regenerative_halfwidth(cycles: Sequence[Cycle]) -> float:
    """99% normal-approximation halfwidth of the ratio estimator sum(G)/sum(L)."""
    k = len(cycles)
    if k < 2:
        return math.inf
    g = np.array([c.good for c in cycles], dtype=float)
    l = np.array([c.length for c in cycles], dtype=float)
    r = g.sum() / l.sum()
    s = np.std(g - r * l, ddof=1)
    return float(Z99 * s / (l.mean() * math.sqrt(k)))


def _seed_value(seed) -> int:
    return int(getattr(seed, "entropy", seed))


class _Driver:
    """Runs the channel continuously, restarting the pass history at each S0."""

    def __init__(self, spec: ChannelSpec, policy, seed):
        self.spec = spec
        self.policy = policy
        self.sim = ChannelSim(spec, seed)
        self.history: List[Label] = [Label("S0")]

    def step(self, bit: int):
        sim = self.sim
        last = self.history[-1]
        if decision_needed(self.spec, last):
            d = self.policy.decide(tuple(self.history))
        else:
            d = Decision.D1
        out = sim.step(ChannelInput(d, bit))
        if sim.state == S0:
            self.history = [Label("S0")]
        elif last.kind not in ("Good", "Bad"):
            self.history.append(out.label)
        return out


def monte_carlo(spec: ChannelSpec, policy, steps: int, seed: int) -> MonteCarloReport:
    if steps < 1:
        raise ValueError("steps must be positive")
    expected = 2 * spec.n + 1 + 2**spec.params.a_exp
    if steps < 10 * expected:
        warnings.warn(f"{steps} steps is under 10 expected cycles ({expected} steps each)", stacklevel=2)
    drv = _Driver(spec, policy, seed)
    sim = drv.sim
    good = bad = passes = bad_passes = 0
    cycles: List[Cycle] = []
    c_len = c_good = 0
    c_bad = False
    for _ in range(steps):
        prev = sim.state
        drv.step(0)
        s = sim.state
        c_len += 1
        if s == AGOOD:
            good += 1
            c_good += 1
            if prev != AGOOD and prev != ABAD:
                passes += 1
        elif s == ABAD:
            bad += 1
            if prev != ABAD and prev != AGOOD:
                passes += 1
                bad_passes += 1
                c_bad = True
        elif s == S0:
            cycles.append(Cycle(len(cycles), c_len, c_good, c_bad))
            c_len = c_good = 0
            c_bad = False
    return MonteCarloReport(
        steps=steps,
        good_frequency=good / steps,
        bad_frequency=bad / steps,
        passes=passes,
        bad_pass_fraction=bad_passes / passes if passes else math.nan,
        seed=_seed_value(seed),
        confidence_halfwidth=_regenerative_halfwidth(cycles),
        cycles=cycles,
    )


def monte_carlo_replicas(spec: ChannelSpec, policy, steps: int, seed: int, replicas: int) -> MonteCarloReport:
    """Independent replicas on spawned seeds, merged by step/pass-weighted averages."""
    children = np.random.SeedSequence(seed).spawn(replicas)
    reps = [monte_carlo(spec, policy, steps, child) for child in children]
    total = steps * replicas
    passes = sum(r.passes for r in reps)
    cycles = [c for r in reps for c in r.cycles]
    return MonteCarloReport(
        steps=total,
        good_frequency=sum(r.good_frequency * r.steps for r in reps) / total,
        bad_frequency=sum(r.bad_frequency * r.steps for r in reps) / total,
        passes=passes,
        bad_pass_fraction=sum(r.bad_pass_fraction * r.passes for r in reps if r.passes) / passes if passes else math.nan,
        seed=seed,
        confidence_halfwidth=_regenerative_halfwidth(cycles),
        cycles=cycles,
    )


def relay_bits(
    spec: ChannelSpec,
    policy,
    bitstream: Sequence[int],
    steps: int,
    seed: int,
    trace: Optional[list] = None,
) -> RelayReport:
    """Send the front unconsumed bit every step; it is consumed when the step lands in AGood.

    Once the stream is exhausted the encoder idles on 0 and nothing more is delivered.
    If ``trace`` is a list, post-transition states are appended to it.
    """
    if len(bitstream) == 0:
        raise ValueError("bitstream must be non-empty")
    drv = _Driver(spec, policy, seed)
    front = 0
    decoded: List[int] = []
    good_steps = 0
    for _ in range(steps):
        pending = front < len(bitstream)
        bit = bitstream[front] if pending else 0
        out = drv.step(bit)
        if trace is not None:
            trace.append(drv.sim.state)
        if out.label.kind == "Good":
            good_steps += 1
            if pending:
                decoded.append(out.bit)
                front += 1
    errors = sum(a != b for a, b in zip(decoded, bitstream))
    return RelayReport(
        steps=steps,
        bits_offered=len(bitstream),
        bits_delivered=len(decoded),
        bit_errors=errors,
        good_steps=good_steps,
        empirical_rate=len(decoded) / steps,
        seed=_seed_value(seed),
    )
