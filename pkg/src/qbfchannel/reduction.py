"""Compile a QBF into its Markov channel gadget.

Per clause row ``i`` and variable column ``j`` there are six states
``A, Ap, T, Tp, F, Fp`` (``p`` marks the primed copy), plus the start state
``S0`` and two lumped end states: ``AGood`` (column n+1, unprimed) and
``ABad`` (column n+1, primed). A row stays primed until one of its literals is
satisfied, at which point the primed T/F state crosses over to the unprimed
``A`` of the next column.

Decision convention: ``D1`` takes the T-branch, ``D2`` the F-branch. Universal
columns ignore the decision and flip a fair coin.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from .qbf import QbfFormula, Quantifier

SPEC_SCHEMA = "qbfchannel.spec/1"
EXPANDED_SCHEMA = "qbfchannel.spec-expanded/1"

DEFAULT_A_EXP = 20
DEFAULT_B_EXP = 40


class Decision(enum.Enum):
    D1 = "D1"
    D2 = "D2"


class Occurrence(enum.Enum):
    NONE = "none"
    POSITIVE = "positive"
    NEGATIVE = "negative"
    BOTH = "both"

    @property
    def positive(self) -> bool:
        return self in (Occurrence.POSITIVE, Occurrence.BOTH)

    @property
    def negative(self) -> bool:
        return self in (Occurrence.NEGATIVE, Occurrence.BOTH)


class State(NamedTuple):
    kind: str  # S0 | A | Ap | T | Tp | F | Fp | AGood | ABad
    i: int = 0
    j: int = 0

    def __str__(self) -> str:
        if self.kind in ("S0", "AGood", "ABad"):
            return self.kind
        return f"{self.kind}({self.i},{self.j})"

    @property
    def primed(self) -> bool:
        return self.kind in ("Ap", "Tp", "Fp", "ABad")

    @property
    def absorbing(self) -> bool:
        return self.kind in ("AGood", "ABad")


class Label(NamedTuple):
    kind: str  # S0 | SetA | SetAp | SetT | SetTp | SetF | SetFp | Good | Bad
    j: int = 0

    def __str__(self) -> str:
        if self.kind in ("S0", "Good", "Bad"):
            return self.kind
        return f"{self.kind}({self.j})"


S0 = State("S0")
AGOOD = State("AGood")
ABAD = State("ABad")

_FAMILIES = ("A", "Ap", "T", "Tp", "F", "Fp")


def parse_state(text: str) -> State:
    text = text.strip()
    if text in ("S0", "AGood", "ABad"):
        return State(text)
    kind, _, rest = text.partition("(")
    i, j = rest.rstrip(")").split(",")
    if kind not in _FAMILIES:
        raise ValueError(f"unknown state {text!r}")
    return State(kind, int(i), int(j))


class UnsupportedSpecError(ValueError):
    """Raised by exact analysis when handed a spec with the leak transition."""


@dataclass(frozen=True)
class ChannelParams:
    """Reset probabilities as exponents: ``p = 2**-a_exp``, ``q = 2**-b_exp``."""

    a_exp: int = DEFAULT_A_EXP
    b_exp: int = DEFAULT_B_EXP
    leak_exp: Optional[int] = None

    def __post_init__(self):
        if self.a_exp < 1 or self.b_exp < 1:
            raise ValueError("exponents must be positive")
        if self.b_exp <= self.a_exp:
            raise ValueError("b_exp must exceed a_exp")
        if self.leak_exp is not None and self.leak_exp <= self.b_exp:
            raise ValueError("leak_exp must exceed b_exp")

    @property
    def p(self) -> Fraction:
        return Fraction(1, 2**self.a_exp)

    @property
    def q(self) -> Fraction:
        return Fraction(1, 2**self.b_exp)

    @property
    def leak(self) -> Fraction:
        return Fraction(0) if self.leak_exp is None else Fraction(1, 2**self.leak_exp)


@dataclass(frozen=True)
class ChannelSpec:
    n: int
    m: int
    quants: Tuple[Quantifier, ...]
    occurrence: Tuple[Tuple[Occurrence, ...], ...]  # [i-1][j-1]
    params: ChannelParams = field(default_factory=ChannelParams)

    def occ(self, i: int, j: int) -> Occurrence:
        return self.occurrence[i - 1][j - 1]

    def is_existential(self, j: int) -> bool:
        return self.quants[j - 1] is Quantifier.EXISTS

    @property
    def state_count(self) -> int:
        return 6 * self.m * self.n + 3

    @property
    def pass_length(self) -> int:
        return 2 * self.n + 1

    def states(self) -> Iterator[State]:
        yield S0
        for i in range(1, self.m + 1):
            for j in range(1, self.n + 1):
                for kind in _FAMILIES:
                    yield State(kind, i, j)
        yield AGOOD
        yield ABAD

    def labels(self) -> List[Label]:
        out = [Label("S0")]
        for j in range(1, self.n + 1):
            out += [Label("Set" + k, j) for k in _FAMILIES]
        return out + [Label("Good"), Label("Bad")]

    def is_valid_state(self, s: State) -> bool:
        if s.kind in ("S0", "AGood", "ABad"):
            return s.i == 0 and s.j == 0
        return s.kind in _FAMILIES and 1 <= s.i <= self.m and 1 <= s.j <= self.n

    def require_no_leak(self) -> None:
        if self.params.leak_exp is not None:
            raise UnsupportedSpecError("exact analysis does not support the good->bad leak")

    def with_params(self, params: ChannelParams) -> "ChannelSpec":
        return ChannelSpec(self.n, self.m, self.quants, self.occurrence, params)

    def to_json(self) -> dict:
        d = {
            "schema": SPEC_SCHEMA,
            "n": self.n,
            "m": self.m,
            "quantifiers": "".join(q.value for q in self.quants),
            "occurrence": [[o.value for o in row] for row in self.occurrence],
            "state_count": self.state_count,
            "a_exp": self.params.a_exp,
            "b_exp": self.params.b_exp,
        }
        if self.params.leak_exp is not None:
            d["leak_exp"] = self.params.leak_exp
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ChannelSpec":
        if d.get("schema") != SPEC_SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        params = ChannelParams(d["a_exp"], d["b_exp"], d.get("leak_exp"))
        return cls(
            d["n"],
            d["m"],
            tuple(Quantifier(c) for c in d["quantifiers"]),
            tuple(tuple(Occurrence(o) for o in row) for row in d["occurrence"]),
            params,
        )


def build_channel(f: QbfFormula, params: Optional[ChannelParams] = None) -> ChannelSpec:
    params = params or ChannelParams()
    rows = []
    for c in f.clauses:
        row = []
        for j in range(1, f.n + 1):
            pos, neg = j in c.literals, -j in c.literals
            row.append(
                Occurrence.BOTH if pos and neg
                else Occurrence.POSITIVE if pos
                else Occurrence.NEGATIVE if neg
                else Occurrence.NONE
            )
        rows.append(tuple(row))
    return ChannelSpec(f.n, f.m, f.quants, tuple(rows), params)


def _next_column(spec: ChannelSpec, i: int, j: int, primed: bool) -> State:
    if j + 1 > spec.n:
        return ABAD if primed else AGOOD
    return State("Ap" if primed else "A", i, j + 1)


def transition(spec: ChannelSpec, s: State, d: Decision) -> Dict[State, Fraction]:
    """Exact next-state distribution from ``s`` under decision ``d``."""
    kind, i, j = s
    if kind == "S0":
        w = Fraction(1, spec.m)
        return {State("Ap", r, 1): w for r in range(1, spec.m + 1)}
    if kind in ("A", "Ap"):
        t, f = ("T", "F") if kind == "A" else ("Tp", "Fp")
        if spec.is_existential(j):
            return {State(t if d is Decision.D1 else f, i, j): Fraction(1)}
        half = Fraction(1, 2)
        return {State(t, i, j): half, State(f, i, j): half}
    if kind in ("T", "F"):
        return {_next_column(spec, i, j, False): Fraction(1)}
    if kind == "Tp":
        return {_next_column(spec, i, j, not spec.occ(i, j).positive): Fraction(1)}
    if kind == "Fp":
        return {_next_column(spec, i, j, not spec.occ(i, j).negative): Fraction(1)}
    if kind == "AGood":
        p, leak = spec.params.p, spec.params.leak
        out = {AGOOD: 1 - p - leak, S0: p}
        if leak:
            out[ABAD] = leak
        return out
    if kind == "ABad":
        q = spec.params.q
        return {ABAD: 1 - q, S0: q}
    raise ValueError(f"invalid state {s}")


def observe(spec: ChannelSpec, s: State) -> Label:
    """Partial state information: the family and column, never the row."""
    if s.kind == "S0":
        return Label("S0")
    if s.kind == "AGood":
        return Label("Good")
    if s.kind == "ABad":
        return Label("Bad")
    return Label("Set" + s.kind, s.j)


def expanded_json(spec: ChannelSpec) -> dict:
    rows = []
    for s in spec.states():
        for d in Decision:
            dist = transition(spec, s, d)
            rows.append(
                {
                    "state": str(s),
                    "decision": d.value,
                    "label": str(observe(spec, s)),
                    "next": {str(t): f"{pr.numerator}/{pr.denominator}" for t, pr in dist.items()},
                }
            )
    return {**spec.to_json(), "schema": EXPANDED_SCHEMA, "transitions": rows}


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
