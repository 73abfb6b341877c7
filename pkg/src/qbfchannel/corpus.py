"""Exhaustive small-formula corpus and the truth-vs-verdict sweep."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional

from .analysis import IndeterminateError, Verdict, decide_gap
from .policy import brute_force_optimum, optimal_bad_probability
from .qbf import Clause, QbfFormula, Quantifier, evaluate_qbf
from .reduction import ChannelParams, build_channel


def clause_universe(n: int) -> List[Clause]:
    """All non-tautological, non-empty clauses over x1..xn (3**n - 1 of them)."""
    out = []
    for signs in itertools.product((0, 1, -1), repeat=n):
        lits = [s * (j + 1) for j, s in enumerate(signs) if s]
        if lits:
            out.append(Clause(frozenset(lits)))
    return out


def corpus_formulas(max_n: int = 3, max_m: int = 2) -> Iterator[QbfFormula]:
    for n in range(1, max_n + 1):
        universe = clause_universe(n)
        for quants in itertools.product((Quantifier.EXISTS, Quantifier.FORALL), repeat=n):
            for m in range(1, max_m + 1):
                for clauses in itertools.combinations_with_replacement(universe, m):
                    yield QbfFormula(n, quants, clauses)


@dataclass
class CorpusRow:
    formula: QbfFormula
    truth: bool
    beta_min: Fraction
    brute_beta: Optional[Fraction]
    verdict: Optional[Verdict]

    @property
    def agrees(self) -> bool:
        return (self.beta_min == 0) == self.truth and self.verdict == (Verdict.HIGH if self.truth else Verdict.LOW)

    @property
    def lemma_bound_ok(self) -> bool:
        return self.truth or self.beta_min >= Fraction(1, self.formula.m * 2**self.formula.n)


def run_corpus(
    max_n: int = 3, max_m: int = 2, params: Optional[ChannelParams] = None, brute_force: bool = True
) -> List[CorpusRow]:
    params = params or ChannelParams()
    rows = []
    for f in corpus_formulas(max_n, max_m):
        spec = build_channel(f, params)
        truth, _ = evaluate_qbf(f)
        solved = optimal_bad_probability(spec)
        try:
            verdict = decide_gap(spec, solved=solved).verdict
        except IndeterminateError:
            verdict = None
        brute = brute_force_optimum(spec) if brute_force else None
        rows.append(CorpusRow(f, truth, solved[0], brute, verdict))
    return rows


def summary_table(rows: List[CorpusRow]) -> str:
    lines = [f"{'n':>2} {'prefix':>6} {'formulas':>9} {'true':>6} {'agree':>6} {'lemma2':>7} {'oracle':>7}"]
    key = lambda r: (r.formula.n, r.formula.prefix)
    for (n, prefix), grp in itertools.groupby(sorted(rows, key=key), key=key):
        grp = list(grp)
        oracle = sum(r.brute_beta is None or r.brute_beta == r.beta_min for r in grp)
        lines.append(
            f"{n:>2} {prefix:>6} {len(grp):>9} {sum(r.truth for r in grp):>6} "
            f"{sum(r.agrees for r in grp):>6} {sum(r.lemma_bound_ok for r in grp):>7} {oracle:>7}"
        )
    total = len(rows)
    lines.append(f"total {total} formulas, {sum(not r.agrees for r in rows)} mismatches")
    return "\n".join(lines)
