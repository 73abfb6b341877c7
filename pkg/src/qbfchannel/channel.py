"""Stepped simulator for the gadget channel with causal, perfect feedback.

The output of step t is returned before the input of step t+1 is chosen.
The output bit carries the input bit exactly when the post-transition state
is ``AGood``; otherwise it is 0.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .reduction import ABAD, AGOOD, S0, ChannelSpec, Decision, Label, State, observe, transition

_BLOCK = 4096


class ChannelInput(NamedTuple):
    decision: Decision
    bit: int


class ChannelOutput(NamedTuple):
    label: Label
    bit: int


class StepRecord(NamedTuple):
    step: int
    state: State  # post-transition
    decision: Decision
    bit_in: int
    label: Label
    bit_out: int


@dataclass
class PassRecord:
    trajectory: List[Tuple[State, Label, Decision]]

    @property
    def final_state(self) -> State:
        return self.trajectory[-1][0]

    @property
    def bad(self) -> bool:
        return self.final_state == ABAD

    def labels(self) -> List[Label]:
        return [lab for _, lab, _ in self.trajectory]


class PassPreconditionError(RuntimeError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; use ``np.random.SeedSequence(seed).spawn`` to split."""
    return np.random.Generator(np.random.Philox(seed))


def decision_needed(spec: ChannelSpec, label: Label) -> bool:
    return label.kind in ("SetA", "SetAp") and spec.is_existential(label.j)


@dataclass
class ChannelSim:
    spec: ChannelSpec
    seed: int = 0
    state: State = S0
    step_count: int = 0
    record: bool = False
    log: List[StepRecord] = field(default_factory=list)

    def __post_init__(self):
        # seed may also be a SeedSequence child from spawn()
        self.rng = make_rng(self.seed)
        self._uniforms = np.empty(0)
        self._pos = 0
        self._table: Dict[Tuple[State, Decision], Tuple[List[State], List[float]]] = {}

    def reset(self) -> None:
        self.state = S0
        self.step_count = 0

    def _uniform(self) -> float:
        if self._pos >= len(self._uniforms):
            self._uniforms = self.rng.random(_BLOCK)
            self._pos = 0
        u = self._uniforms[self._pos]
        self._pos += 1
        return u

    def _row(self, s: State, d: Decision):
        key = (s, d)
        row = self._table.get(key)
        if row is None:
            dist = transition(self.spec, s, d)
            outcomes = list(dist)
            cum, acc = [], 0
            for t in outcomes:
                acc += dist[t]
                cum.append(float(acc))
            cum[-1] = 1.0
            row = self._table[key] = (outcomes, cum)
        return row

    def sample_next(self, d: Decision) -> State:
        outcomes, cum = self._row(self.state, d)
        if len(outcomes) == 1:
            return outcomes[0]
        return outcomes[bisect.bisect_right(cum, self._uniform())]

    def step(self, inp: ChannelInput) -> ChannelOutput:
        nxt = self.sample_next(inp.decision)
        self.state = nxt
        self.step_count += 1
        out = ChannelOutput(observe(self.spec, nxt), inp.bit if nxt == AGOOD else 0)
        if self.record:
            self.log.append(StepRecord(self.step_count, nxt, inp.decision, inp.bit, out.label, out.bit))
        return out

    def run_pass(self, policy, bits: Optional[Sequence[int]] = None) -> PassRecord:
        """Drive one pass from ``S0`` to an end state, feeding labels back to ``policy``."""
        if self.state != S0:
            raise PassPreconditionError(f"pass must start at S0, not {self.state}")
        history = [Label("S0")]
        traj = []
        while True:
            cur = history[-1]
            d = policy.decide(tuple(history)) if decision_needed(self.spec, cur) else Decision.D1
            bit = bits[len(traj)] if bits is not None else 0
            out = self.step(ChannelInput(d, bit))
            traj.append((self.state, out.label, d))
            history.append(out.label)
            if self.state.absorbing:
                return PassRecord(traj)


def dump_trajectory(records: Sequence[StepRecord]) -> str:
    """Tab-separated: step, state, decision, bit_in, label, bit_out."""
    lines = [
        f"{r.step}\t{r.state}\t{r.decision.value}\t{r.bit_in}\t{r.label}\t{r.bit_out}" for r in records
    ]
    return "\n".join(lines) + ("\n" if lines else "")
