from fractions import Fraction

import pytest

from qbfchannel.analysis import cycle_stats
from qbfchannel.policy import assignment_policy, optimal_bad_probability, strategy_policy
from qbfchannel.qbf import QbfFormula, evaluate_qbf
from qbfchannel.reduction import AGOOD, ChannelParams, build_channel
from qbfchannel.sim import monte_carlo, monte_carlo_replicas, relay_bits

P6_12 = ChannelParams(6, 12)


def test_reproducible(q2):
    spec = build_channel(q2, P6_12)
    a = monte_carlo(spec, assignment_policy({1: True}), 50_000, seed=5)
    b = monte_carlo(spec, assignment_policy({1: True}), 50_000, seed=5)
    assert a == b
    c = monte_carlo(spec, assignment_policy({1: True}), 50_000, seed=6)
    assert c != a


def test_report_invariants(q2):
    r = monte_carlo(build_channel(q2, ChannelParams(3, 6)), assignment_policy({1: True}), 100_000, seed=1)
    assert 0 <= r.good_frequency <= 1 and 0 <= r.bad_frequency <= 1
    assert r.good_frequency + r.bad_frequency <= 1
    assert r.passes >= len(r.cycles) and r.confidence_halfwidth > 0
    assert sum(c.length for c in r.cycles) <= r.steps


def test_short_run_warns(q1):
    with pytest.warns(UserWarning, match="expected cycles"):
        monte_carlo(build_channel(q1, P6_12), assignment_policy({1: True}), 100, seed=0)


def test_mc_against_exact_small_exponents(q2):
    # a=3, b=6: exact occupancy (3/4*8)/(5 + 6 + 16) = 6/27
    spec = build_channel(q2, ChannelParams(3, 6))
    beta, pol = optimal_bad_probability(spec)
    exact = cycle_stats(2, 2, beta, spec.params).occupancy
    assert exact == Fraction(6, 27)
    r = monte_carlo(spec, pol, 300_000, seed=0)
    assert abs(r.good_frequency - float(exact)) <= r.confidence_halfwidth
    assert abs(r.bad_pass_fraction - 0.25) <= 0.02


def test_degenerate_all_bad():
    f = QbfFormula.from_prefix("e", [[1]])
    spec = build_channel(f, P6_12)
    r = monte_carlo(spec, assignment_policy({1: False}), 100_000, seed=2)
    assert r.good_frequency == 0
    assert r.good_frequency <= 3 / (3 + 2**12) + 0.01
    assert r.bad_pass_fraction == 1


def test_leak_is_simulated(q1):
    spec = build_channel(q1, ChannelParams(4, 5, 6))
    r = monte_carlo(spec, strategy_policy(evaluate_qbf(q1)[1]), 200_000, seed=3)
    # winning policy never ends a pass bad; the leak still reaches ABad
    assert r.bad_pass_fraction == 0 and r.bad_frequency > 0


def test_replicas_merge(q2):
    spec = build_channel(q2, ChannelParams(3, 6))
    r = monte_carlo_replicas(spec, assignment_policy({1: True}), 40_000, seed=9, replicas=3)
    assert r.steps == 120_000
    assert r == monte_carlo_replicas(spec, assignment_policy({1: True}), 40_000, seed=9, replicas=3)


def test_cycles_csv(q1):
    r = monte_carlo(build_channel(q1, ChannelParams(2, 4)), assignment_policy({1: True}), 200, seed=0)
    lines = r.cycles_csv().splitlines()
    assert lines[0] == "cycle,length,good_dwell,outcome"
    assert len(lines) == len(r.cycles) + 1


def test_relay_accounting(q2):
    spec = build_channel(q2, ChannelParams(3, 6))
    trace = []
    bits = [(7 * k) % 3 % 2 for k in range(20_000)]
    rep = relay_bits(spec, assignment_policy({1: True}), bits, 20_000, seed=4, trace=trace)
    assert rep.bit_errors == 0
    assert rep.bits_delivered == rep.good_steps == sum(s == AGOOD for s in trace)
    assert rep.empirical_rate == rep.bits_delivered / 20_000


def test_relay_stream_exhausted(q1):
    spec = build_channel(q1, P6_12)
    rep = relay_bits(spec, assignment_policy({1: True}), [1, 0, 1], 1000, seed=0)
    assert rep.bits_delivered == 3 and rep.bit_errors == 0 and rep.good_steps > 3


def test_relay_rate_q1(q1):
    spec = build_channel(q1, P6_12)
    rep = relay_bits(spec, strategy_policy(evaluate_qbf(q1)[1]), [1] * 100_000, 100_000, seed=7)
    assert abs(rep.empirical_rate - 64 / 69) <= 0.02


def test_relay_needs_bits(q1):
    with pytest.raises(ValueError):
        relay_bits(build_channel(q1), assignment_policy({}), [], 10, seed=0)
