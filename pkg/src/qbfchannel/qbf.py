"""Quantified Boolean formulas: QDIMACS I/O, brute-force evaluation, strategies.

A formula is a quantifier prefix over variables ``1..n`` followed by a CNF
matrix. Evaluation is exhaustive game-tree recursion; it doubles as the truth
oracle for the channel reduction, so it is kept deliberately simple.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

MAX_EVAL_VARS = 24


class Quantifier(enum.Enum):
    EXISTS = "e"
    FORALL = "a"

    def flipped(self) -> "Quantifier":
        return Quantifier.FORALL if self is Quantifier.EXISTS else Quantifier.EXISTS


class QdimacsError(ValueError):
    """Base class for QDIMACS parse failures; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.line = line


class HeaderError(QdimacsError):
    pass


class VariableRangeError(QdimacsError):
    pass


class EmptyClauseError(QdimacsError):
    pass


class ClauseCountError(QdimacsError):
    pass


class SyntaxError_(QdimacsError):
    """Unparseable token, missing terminator, or misplaced line."""


class FormulaError(ValueError):
    pass


class StrategyError(ValueError):
    """A strategy was asked for a prefix it does not define."""


class SizeGuardError(ValueError):
    pass


# A literal is a signed variable index, DIMACS style.
Literal = int


@dataclass(frozen=True)
class Clause:
    literals: frozenset

    def __post_init__(self):
        if not self.literals:
            raise FormulaError("empty clause")
        if any(not isinstance(l, int) or l == 0 for l in self.literals):
            raise FormulaError(f"bad literal in {sorted(self.literals)}")

    @classmethod
    def of(cls, *lits: int) -> "Clause":
        return cls(frozenset(lits))

    def variables(self) -> set:
        return {abs(l) for l in self.literals}

    def is_tautology(self) -> bool:
        return any(-l in self.literals for l in self.literals)

    def sorted_literals(self) -> List[int]:
        return sorted(self.literals, key=lambda l: (abs(l), l < 0))

    def satisfied_by(self, assignment: Tuple[bool, ...]) -> bool:
        # assignment[k] is the value of variable k+1
        return any(assignment[abs(l) - 1] == (l > 0) for l in self.literals)


@dataclass(frozen=True)
class QbfFormula:
    n: int
    quants: Tuple[Quantifier, ...]
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 1:
            raise FormulaError("need at least one variable")
        if len(self.quants) != self.n:
            raise FormulaError(f"{len(self.quants)} quantifiers for {self.n} variables")
        if not self.clauses:
            raise FormulaError("need at least one clause")
        for c in self.clauses:
            bad = [v for v in c.variables() if v > self.n]
            if bad:
                raise FormulaError(f"variable {bad[0]} out of range 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def prefix(self) -> str:
        return "".join(q.value for q in self.quants)

    @classmethod
    def from_prefix(cls, prefix: str, clauses: Iterable[Iterable[int]]) -> "QbfFormula":
        """Shorthand: ``QbfFormula.from_prefix("ea", [[1, 2], [1, -2]])``."""
        quants = tuple(Quantifier(ch) for ch in prefix)
        return cls(len(quants), quants, tuple(Clause(frozenset(c)) for c in clauses))

    def matrix(self, assignment: Tuple[bool, ...]) -> bool:
        return all(c.satisfied_by(assignment) for c in self.clauses)

    def universal_indices(self) -> List[int]:
        return [j for j in range(1, self.n + 1) if self.quants[j - 1] is Quantifier.FORALL]

    def existential_indices(self) -> List[int]:
        return [j for j in range(1, self.n + 1) if self.quants[j - 1] is Quantifier.EXISTS]

    def __str__(self) -> str:
        sym = {Quantifier.EXISTS: "∃", Quantifier.FORALL: "∀"}
        pre = "".join(f"{sym[q]}x{j}" for j, q in enumerate(self.quants, 1))

        def lit(l):
            return f"x{l}" if l > 0 else f"¬x{-l}"

        body = "".join("(" + "∨".join(lit(l) for l in c.sorted_literals()) + ")" for c in self.clauses)
        return f"{pre} {body}"


# ---------------------------------------------------------------------------
# QDIMACS


def _ints(tokens: List[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise SyntaxError_(f"non-integer token in {' '.join(tokens)!r}", lineno) from None


def parse_qdimacs(text: str) -> QbfFormula:
    """Parse QDIMACS text. Unlisted variables default to outermost existential."""
    n = m = None
    kinds: Dict[int, Quantifier] = {}
    blocks: List[Tuple[Quantifier, List[int]]] = []
    clauses: List[Clause] = []
    lineno = 0
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        last_line = lineno
        tokens = line.split()
        if n is None:
            if tokens[0] != "p" or len(tokens) != 4 or tokens[1] != "cnf":
                raise HeaderError("malformed header (expected 'p cnf <n> <m>')", lineno)
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise HeaderError("malformed header (non-integer counts)", lineno) from None
            if n < 1 or m < 1:
                raise HeaderError("malformed header (counts must be positive)", lineno)
            continue
        if tokens[0] == "p":
            raise HeaderError("duplicate header", lineno)
        if tokens[0] in ("e", "a"):
            if clauses:
                raise SyntaxError_("quantifier line after clauses", lineno)
            vals = _ints(tokens[1:], lineno)
            if not vals or vals[-1] != 0 or 0 in vals[:-1]:
                raise SyntaxError_("quantifier line must end with a single 0", lineno)
            q = Quantifier(tokens[0])
            for v in vals[:-1]:
                if not 1 <= v <= n:
                    raise VariableRangeError(f"variable index {v} out of range 1..{n}", lineno)
                if v in kinds:
                    raise SyntaxError_(f"variable {v} quantified twice", lineno)
                kinds[v] = q
            blocks.append((q, vals[:-1]))
            continue
        vals = _ints(tokens, lineno)
        if vals[-1] != 0 or 0 in vals[:-1]:
            raise SyntaxError_("clause must end with a single 0", lineno)
        lits = vals[:-1]
        if not lits:
            raise EmptyClauseError("empty clause", lineno)
        for l in lits:
            if not 1 <= abs(l) <= n:
                raise VariableRangeError(f"variable index {abs(l)} out of range 1..{n}", lineno)
        if len(clauses) >= m:
            raise ClauseCountError(f"more than {m} clauses", lineno)
        clause = Clause(frozenset(lits))
        if clause.is_tautology():
            warnings.warn(f"tautological clause at line {lineno}", stacklevel=2)
        clauses.append(clause)
    if n is None:
        raise HeaderError("missing header", max(lineno, 1))
    if len(clauses) != m:
        raise ClauseCountError(f"expected {m} clauses, found {len(clauses)}", last_line or lineno)

    # Quantifier order in the file must agree with variable order: the channel
    # gadget walks columns 1..n, so a prefix like "a 2 0 / e 1 0" cannot be
    # represented faithfully.
    free = [v for v in range(1, n + 1) if v not in kinds]
    merged: List[Tuple[Quantifier, List[int]]] = [(Quantifier.EXISTS, free)]
    for q, vs in blocks:
        if merged[-1][0] is q:
            merged[-1] = (q, merged[-1][1] + vs)
        else:
            merged.append((q, list(vs)))
    full = [v for _, vs in merged for v in sorted(vs)]
    if full != sorted(full):
        raise SyntaxError_("quantifier blocks must follow variable numbering", last_line)
    quants = tuple(kinds.get(v, Quantifier.EXISTS) for v in range(1, n + 1))
    return QbfFormula(n, quants, tuple(clauses))


def serialize_qdimacs(f: QbfFormula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    for q, group in itertools.groupby(range(1, f.n + 1), key=lambda v: f.quants[v - 1]):
        lines.append(f"{q.value} " + " ".join(map(str, group)) + " 0")
    for c in f.clauses:
        lines.append(" ".join(map(str, c.sorted_literals())) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation

# (existential index j, values of x_1..x_{j-1}) -> value of x_j
ExistentialStrategy = Dict[Tuple[int, Tuple[bool, ...]], bool]


def evaluate_qbf(f: QbfFormula) -> Tuple[bool, Optional[ExistentialStrategy]]:
    """Decide ``f`` by full game-tree search.

    Returns ``(True, strategy)`` with a winning existential strategy defined on
    every prefix reachable when playing it, or ``(False, None)``. Existential
    choices try ``True`` first, so ties resolve toward true.
    """
    if f.n > MAX_EVAL_VARS:
        raise SizeGuardError(f"n={f.n} exceeds brute-force limit {MAX_EVAL_VARS}")

    def win(prefix: Tuple[bool, ...]) -> Optional[ExistentialStrategy]:
        j = len(prefix) + 1
        if j > f.n:
            return {} if f.matrix(prefix) else None
        if f.quants[j - 1] is Quantifier.EXISTS:
            for val in (True, False):
                sub = win(prefix + (val,))
                if sub is not None:
                    sub[(j, prefix)] = val
                    return sub
            return None
        merged: ExistentialStrategy = {}
        for val in (True, False):
            sub = win(prefix + (val,))
            if sub is None:
                return None
            merged.update(sub)
        return merged

    strategy = win(())
    return (strategy is not None), strategy


def play_strategy(f: QbfFormula, s: ExistentialStrategy, universal_values: Tuple[bool, ...]) -> Tuple[bool, ...]:
    """Full assignment produced by ``s`` against the given universal moves."""
    moves = iter(universal_values)
    prefix: Tuple[bool, ...] = ()
    for j in range(1, f.n + 1):
        if f.quants[j - 1] is Quantifier.FORALL:
            prefix += (next(moves),)
        else:
            try:
                prefix += (s[(j, prefix)],)
            except KeyError:
                raise StrategyError(f"strategy undefined for x{j} after {prefix}") from None
    return prefix


def check_strategy(f: QbfFormula, s: ExistentialStrategy) -> bool:
    u = len(f.universal_indices())
    return all(f.matrix(play_strategy(f, s, us)) for us in itertools.product((True, False), repeat=u))


def all_strategies(f: QbfFormula) -> Iterator[ExistentialStrategy]:
    """Every existential strategy restricted to its own reachable prefixes.

    Exponential in the number of universal outcomes; meant for n <= 3 oracles.
    """

    def gen(prefix: Tuple[bool, ...]) -> Iterator[ExistentialStrategy]:
        j = len(prefix) + 1
        if j > f.n:
            yield {}
            return
        if f.quants[j - 1] is Quantifier.EXISTS:
            for val in (True, False):
                for sub in gen(prefix + (val,)):
                    yield {**sub, (j, prefix): val}
            return
        for left, right in itertools.product(list(gen(prefix + (True,))), list(gen(prefix + (False,)))):
            yield {**left, **right}

    return gen(())


def negated_polarity(f: QbfFormula) -> QbfFormula:
    return QbfFormula(f.n, f.quants, tuple(Clause(frozenset(-l for l in c.literals)) for c in f.clauses))


def dual_truth(f: QbfFormula) -> bool:
    """Truth of the dual game: quantifiers swapped and the matrix negated.

    The negated matrix is a DNF, so this evaluates it directly rather than
    going through :class:`QbfFormula`.
    """
    quants = [q.flipped() for q in f.quants]

    def val(prefix):
        j = len(prefix) + 1
        if j > f.n:
            return not f.matrix(prefix)
        branches = (val(prefix + (b,)) for b in (True, False))
        return any(branches) if quants[j - 1] is Quantifier.EXISTS else all(branches)

    return val(())
