"""Exit criteria, one test per criterion; each records a PASS/FAIL line."""

import itertools
import time
import warnings
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from qbfchannel.analysis import HIGH_THRESHOLD, LOW_THRESHOLD, IndeterminateError, Verdict, decide_gap
from qbfchannel.corpus import corpus_formulas
from qbfchannel.policy import (
    GuardError,
    assignment_policy,
    enumerate_policies,
    optimal_bad_probability,
    pass_bad_probability,
    strategy_policy,
)
from qbfchannel.qbf import (
    ClauseCountError,
    EmptyClauseError,
    HeaderError,
    QbfFormula,
    SyntaxError_,
    VariableRangeError,
    evaluate_qbf,
    parse_qdimacs,
    serialize_qdimacs,
)
from qbfchannel.reduction import AGOOD, ChannelParams, Decision, State, build_channel, transition
from qbfchannel.sim import monte_carlo, relay_bits

CORPUS = list(corpus_formulas(3, 2))
MC_PARAMS = ChannelParams(6, 12)
MC_SEED = 0  # package default seed


def record(k, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def solved():
    t0 = time.perf_counter()
    rows = []
    for f in CORPUS:
        spec = build_channel(f)
        rows.append((f, spec, evaluate_qbf(f)[0], optimal_bad_probability(spec)))
    return rows, time.perf_counter() - t0


def test_1_reduction_sound_and_complete(solved):
    rows, elapsed = solved
    bad = [f for f, _, truth, (beta, _) in rows if (beta == 0) != truth]
    record(1, not bad and elapsed < 120,
           f"{len(rows)} formulas, {len(bad)} mismatches between beta_min = 0 and QBF truth ({elapsed:.1f}s)")


def test_2_bad_entry_bound(solved):
    rows, _ = solved
    false_rows = [(f, beta) for f, _, truth, (beta, _) in rows if not truth]
    viol = [f for f, beta in false_rows if beta < Fraction(1, f.m * 2**f.n)]
    record(2, not viol, f"{len(false_rows)} false formulas, {len(viol)} with beta_min < 2^-n/m")


def test_3_gap_decision(solved):
    rows, _ = solved
    wrong = []
    for f, spec, truth, sol in rows:
        try:
            d = decide_gap(spec, solved=sol)
        except IndeterminateError:
            wrong.append(f)
            continue
        if truth and not (d.verdict is Verdict.HIGH and d.bounds.lower > HIGH_THRESHOLD):
            wrong.append(f)
        if not truth and not (d.verdict is Verdict.LOW and d.bounds.upper < LOW_THRESHOLD):
            wrong.append(f)
        assert not (d.bounds.lower > HIGH_THRESHOLD and d.bounds.upper < LOW_THRESHOLD)
    q1 = decide_gap(build_channel(QbfFormula.from_prefix("ea", [[1, 2], [1, -2]])))
    q2 = decide_gap(build_channel(QbfFormula.from_prefix("ea", [[1, 2], [-1, 2]])))
    anchors = q1.bounds.lower == Fraction(1048576, 1048581) and abs(float(q2.bounds.upper) - 2.861e-6) < 5e-10
    record(3, not wrong and anchors,
           f"a_exp=20 b_exp=40: {len(rows) - len(wrong)}/{len(rows)} verdicts agree with truth; "
           f"Q1 lower={q1.bounds.lower} Q2 upper={float(q2.bounds.upper):.4g}")


def test_4_oracle_equivalence(solved):
    rows, _ = solved
    checked = skipped = 0
    bad = []
    for f, spec, _, (beta, _) in rows:
        try:
            brute = min(pass_bad_probability(spec, pol).beta for pol in enumerate_policies(spec))
        except GuardError:
            skipped += 1
            continue
        checked += 1
        if brute != beta:
            bad.append(f)
    record(4, not bad, f"{checked} instances checked ({skipped} over guard), {len(bad)} discrepancies")


def test_5_monte_carlo_vs_exact():
    q1 = QbfFormula.from_prefix("ea", [[1, 2], [1, -2]])
    q2 = QbfFormula.from_prefix("ea", [[1, 2], [-1, 2]])
    t0 = time.perf_counter()
    r1 = monte_carlo(build_channel(q1, MC_PARAMS), strategy_policy(evaluate_qbf(q1)[1]), 10**6, MC_SEED)
    t1 = time.perf_counter()
    r2 = monte_carlo(build_channel(q2, MC_PARAMS), assignment_policy({1: True}), 10**6, MC_SEED)
    t2 = time.perf_counter()
    e1 = abs(r1.good_frequency - 64 / 69)
    e2 = abs(r2.bad_pass_fraction - 0.25)
    e3 = abs(r2.good_frequency - 48 / 1077)
    ok = e1 <= 0.01 and e2 <= 0.02 and e3 <= 0.01 and t1 - t0 < 30 and t2 - t1 < 30
    record(5, ok,
           f"seed {MC_SEED}: Q1 |good-64/69|={e1:.4f}; Q2 |badpass-1/4|={e2:.4f} ({r2.passes} passes), "
           f"|good-48/1077|={e3:.4f}; {t1 - t0:.1f}s/{t2 - t1:.1f}s")


def test_6_relay():
    picks = CORPUS[:: len(CORPUS) // 6][:6]
    failures = []
    for k, f in enumerate(picks):
        spec = build_channel(f, MC_PARAMS)
        _, pol = optimal_bad_probability(spec)
        trace = []
        bits = [(k + t * 2654435761) >> 7 & 1 for t in range(10**5)]
        rep = relay_bits(spec, pol, bits, 10**5, seed=100 + k, trace=trace)
        if rep.bit_errors or rep.bits_delivered != sum(s == AGOOD for s in trace):
            failures.append(str(f))
    record(6, not failures, f"{len(picks)} corpus specs x 1e5 steps: bit_errors=0 and delivered == AGood steps")


def _prime_property_holds(f, spec):
    for i, clause in enumerate(f.clauses, 1):
        for values in itertools.product((True, False), repeat=f.n):
            state, length = State("Ap", i, 1), 1
            while True:
                j = f.n + 1 if state.absorbing else state.j
                if state.kind in ("A", "Ap") or state.absorbing:
                    sat = any(abs(l) < j and values[abs(l) - 1] == (l > 0) for l in clause.literals)
                    if state.primed == sat:
                        return False
                if state.absorbing:
                    break
                d = Decision.D1 if (state.kind not in ("A", "Ap") or values[j - 1]) else Decision.D2
                dist = transition(spec, state, d)
                if len(dist) > 1:
                    want = ("T" if values[j - 1] else "F") + ("p" if state.primed else "")
                    dist = {t: p for t, p in dist.items() if t.kind == want}
                (state,) = dist
                length += 1
            if length != 2 * f.n + 1:
                return False
    return True


def test_7_structural_invariants():
    bad_rows = bad_paths = 0
    for f in CORPUS:
        spec = build_channel(f)
        bad_rows += sum(sum(transition(spec, s, d).values()) != 1 for s in spec.states() for d in Decision)
        bad_paths += not _prime_property_holds(f, spec)
    record(7, not bad_rows and not bad_paths,
           f"{len(CORPUS)} specs: {bad_rows} rows not summing to 1, {bad_paths} specs failing pass length / prime status")


ADVERSARIAL = [
    ("", HeaderError),
    ("p cnf 2\n1 0\n", HeaderError),
    ("p cnf 2 1 extra\n1 0\n", HeaderError),
    ("p sat 2 1\n1 0\n", HeaderError),
    ("p cnf -1 1\n1 0\n", HeaderError),
    ("p cnf 2 0\n", HeaderError),
    ("1 2 0\np cnf 2 1\n", HeaderError),
    ("p cnf 2 1\np cnf 2 1\n1 0\n", HeaderError),
    ("p cnf 2 1\n3 0\n", VariableRangeError),
    ("p cnf 2 1\n-7 0\n", VariableRangeError),
    ("p cnf 2 1\na 3 0\n1 0\n", VariableRangeError),
    ("p cnf 2 1\n0\n", EmptyClauseError),
    ("p cnf 2 2\n1 0\n0\n", EmptyClauseError),
    ("p cnf 2 2\n1 0\n", ClauseCountError),
    ("p cnf 2 1\n1 0\n-1 0\n", ClauseCountError),
    ("p cnf 2 1\n1 2\n", SyntaxError_),
    ("p cnf 2 1\n1 two 0\n", SyntaxError_),
    ("p cnf 2 1\ne 1 0 2 0\n1 0\n", SyntaxError_),
    ("p cnf 2 1\na 1 0\na 1 0\n1 0\n", SyntaxError_),
    ("p cnf 2 1\n1 0\na 2 0\n", SyntaxError_),
]


def test_8_parser():
    assert len(ADVERSARIAL) == 20
    roundtrip_bad = sum(parse_qdimacs(serialize_qdimacs(f)) != f for f in CORPUS)
    wrong = []
    for text, exc in ADVERSARIAL:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                parse_qdimacs(text)
            wrong.append(text)
        except exc as e:
            if "line" not in str(e):
                wrong.append(text)
        except Exception:
            wrong.append(text)
    record(8, not roundtrip_bad and not wrong,
           f"{len(CORPUS)} round-trips ({roundtrip_bad} failures); {20 - len(wrong)}/20 malformed inputs rejected with the right class")
