"""Within-pass decision policies and their exact bad-absorption probability.

A history is the tuple of labels seen since the pass left ``S0`` (starting
with ``Label("S0")`` itself). Policies are only consulted when the latest
label is an A-family label of an existential column.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .channel import decision_needed
from .qbf import ExistentialStrategy
from .reduction import ABAD, S0, ChannelSpec, Decision, Label, State, observe, transition

History = Tuple[Label, ...]

SCENARIO_GUARD = 2**22
ENUM_GUARD = 2**14


class HistoryError(ValueError):
    """History does not follow the gadget's column progression."""


class GuardError(ValueError):
    pass


@dataclass
class DecisionPolicy:
    name: str
    table: Dict[History, Decision] = field(default_factory=dict)
    rule: Optional[Callable[[History], Decision]] = None
    default: Decision = Decision.D1

    def decide(self, history: History) -> Decision:
        d = self.table.get(history)
        if d is not None:
            return d
        if self.rule is not None:
            return self.rule(history)
        return self.default

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "table": [
                {"history": " ".join(map(str, h)), "decision": d.value}
                for h, d in sorted(self.table.items(), key=lambda kv: (len(kv[0]), list(map(str, kv[0]))))
            ],
        }


def validate_history(history: History) -> None:
    if not history or history[0] != Label("S0"):
        raise HistoryError("history must start at S0")
    for pos, lab in enumerate(history[1:], 1):
        col = (pos + 1) // 2
        allowed = ("SetA", "SetAp") if pos % 2 else ("SetT", "SetTp", "SetF", "SetFp")
        if lab.kind in ("Good", "Bad") and pos % 2 == 1 and pos == len(history) - 1:
            continue
        if lab.kind not in allowed or lab.j != col:
            raise HistoryError(f"label {lab} cannot appear at position {pos}")


def history_assignment(history: History) -> Tuple[bool, ...]:
    """Variable values revealed by the T/F labels, in column order."""
    return tuple(lab.kind in ("SetT", "SetTp") for lab in history[2::2])


def strategy_policy(s: ExistentialStrategy, name: str = "strategy") -> DecisionPolicy:
    """Play ``s``: D1 when it sets the current variable true.

    Prefixes the strategy never reaches fall back to D1, keeping the policy total.
    """

    def rule(history: History) -> Decision:
        validate_history(history)
        last = history[-1]
        if last.kind not in ("SetA", "SetAp"):
            raise HistoryError(f"no decision is taken at {last}")
        prefix = history_assignment(history)
        value = s.get((last.j, prefix), True)
        return Decision.D1 if value else Decision.D2

    return DecisionPolicy(name, rule=rule)


def assignment_policy(values: Dict[int, bool], name: Optional[str] = None) -> DecisionPolicy:
    """Fixed values for existential variables, ignoring the history."""
    label = name or ",".join(f"x{j}:={'true' if v else 'false'}" for j, v in sorted(values.items()))

    def rule(history: History) -> Decision:
        return Decision.D1 if values.get(history[-1].j, True) else Decision.D2

    return DecisionPolicy(label, rule=rule)


@dataclass
class PassAnalysis:
    beta: Fraction
    scenario_table: Dict[Tuple[int, Tuple[bool, ...]], State]
    policy_name: str
    scenario_weight: Fraction

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# policy={self.policy_name} beta={self.beta.numerator}/{self.beta.denominator}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["clause_row", "universals", "final_state", "weight"])
        wt = f"{self.scenario_weight.numerator}/{self.scenario_weight.denominator}"
        for (i, u), final in sorted(self.scenario_table.items(), key=lambda kv: (kv[0][0], [not b for b in kv[0][1]])):
            w.writerow([i, "".join("T" if b else "F" for b in u) or "-", str(final), wt])
        return buf.getvalue()


def _universal_count(spec: ChannelSpec) -> int:
    return sum(1 for j in range(1, spec.n + 1) if not spec.is_existential(j))


def _check_scenario_guard(spec: ChannelSpec) -> int:
    u = _universal_count(spec)
    if spec.m * 2**u > SCENARIO_GUARD:
        raise GuardError(f"m*2^u = {spec.m * 2**u} scenarios exceeds {SCENARIO_GUARD}")
    return u


def trace_scenario(spec: ChannelSpec, pol: DecisionPolicy, i: int, universals: Tuple[bool, ...]) -> List[State]:
    """Deterministic trajectory for hidden row ``i`` and fixed universal coin outcomes."""
    coins = iter(universals)
    state = State("Ap", i, 1)
    assert state in transition(spec, S0, Decision.D1)
    history = [Label("S0"), observe(spec, state)]
    path = [state]
    while not state.absorbing:
        d = pol.decide(tuple(history)) if decision_needed(spec, history[-1]) else Decision.D1
        dist = transition(spec, state, d)
        if len(dist) == 1:
            (state,) = dist
        else:
            want = ("T" if next(coins) else "F") + ("p" if state.primed else "")
            (state,) = [t for t in dist if t.kind == want]
        path.append(state)
        history.append(observe(spec, state))
    return path


def pass_bad_probability(spec: ChannelSpec, pol: DecisionPolicy) -> PassAnalysis:
    spec.require_no_leak()
    u = _check_scenario_guard(spec)
    weight = Fraction(1, spec.m * 2**u)
    table = {}
    bad = 0
    for i in range(1, spec.m + 1):
        for us in itertools.product((True, False), repeat=u):
            final = trace_scenario(spec, pol, i, us)[-1]
            table[(i, us)] = final
            bad += final == ABAD
    return PassAnalysis(bad * weight, table, pol.name, weight)


def _split(spec: ChannelSpec, particles: Dict[State, Fraction], d: Decision) -> Dict[Label, Dict[State, Fraction]]:
    groups: Dict[Label, Dict[State, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for s, w in particles.items():
        for t, pr in transition(spec, s, d).items():
            groups[observe(spec, t)][t] += w * pr
    return groups


def optimal_bad_probability(spec: ChannelSpec) -> Tuple[Fraction, DecisionPolicy]:
    """Minimum pass bad probability by backward induction over label histories.

    Each node carries the unnormalised joint mass of the hidden states
    consistent with its history, so a node's value is P(history, bad) and
    sums over children directly. Ties go to D1.
    """
    spec.require_no_leak()
    _check_scenario_guard(spec)

    def solve(history: History, particles: Dict[State, Fraction]) -> Tuple[Fraction, Dict[History, Decision]]:
        last = history[-1]
        if last.kind == "Good":
            return Fraction(0), {}
        if last.kind == "Bad":
            return sum(particles.values(), Fraction(0)), {}
        options = (Decision.D1, Decision.D2) if decision_needed(spec, last) else (Decision.D1,)
        best = None
        for d in options:
            value, choices = Fraction(0), {}
            for lab, group in _split(spec, particles, d).items():
                v, c = solve(history + (lab,), group)
                value += v
                choices.update(c)
            if best is None or value < best[0]:
                if len(options) == 2:
                    choices[history] = d
                best = (value, choices)
        return best

    beta, table = solve((Label("S0"),), {S0: Fraction(1)})
    return beta, DecisionPolicy("optimal", table)


def _decision_histories(spec: ChannelSpec) -> int:
    count = 0

    def walk(history, particles):
        nonlocal count
        last = history[-1]
        if last.kind in ("Good", "Bad"):
            return
        need = decision_needed(spec, last)
        count += need
        if count > ENUM_GUARD:
            raise GuardError(f"more than {ENUM_GUARD} reachable decision histories")
        for d in (Decision.D1, Decision.D2) if need else (Decision.D1,):
            for lab, group in _split(spec, particles, d).items():
                walk(history + (lab,), group)

    walk((Label("S0"),), {S0: Fraction(1)})
    return count


def enumerate_policies(spec: ChannelSpec) -> Iterator[DecisionPolicy]:
    """Every deterministic policy, restricted to the histories it can reach."""
    _decision_histories(spec)

    def gen(history, particles) -> List[Dict[History, Decision]]:
        last = history[-1]
        if last.kind in ("Good", "Bad"):
            return [{}]
        need = decision_needed(spec, last)
        out = []
        for d in (Decision.D1, Decision.D2) if need else (Decision.D1,):
            subs = [gen(history + (lab,), g) for lab, g in _split(spec, particles, d).items()]
            for combo in itertools.product(*subs):
                table = {history: d} if need else {}
                for c in combo:
                    table.update(c)
                out.append(table)
        return out

    for k, table in enumerate(gen((Label("S0"),), {S0: Fraction(1)})):
        yield DecisionPolicy(f"enum#{k}", table)


def brute_force_optimum(spec: ChannelSpec) -> Fraction:
    return min(pass_bad_probability(spec, pol).beta for pol in enumerate_policies(spec))
