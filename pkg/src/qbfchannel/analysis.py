"""Renewal-reward rate bounds and the high/low capacity decision.

One cycle runs from ``S0`` back to ``S0``: ``2n+1`` transit steps, then a
geometric dwell in ``AGood`` (mean ``1/p``, one noiseless bit per step) or in
``ABad`` (mean ``1/q``, nothing). The bounds here are certificates for the
reduction at finite scale, not the true feedback capacity: the lower bound is
the rate of the bit-relay scheme, the upper bound credits every good step
with one bit and each pass's transit with ``log2(6mn+3)`` bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .policy import DecisionPolicy, optimal_bad_probability
from .reduction import ChannelParams, ChannelSpec, UnsupportedSpecError

GAPDECISION_SCHEMA = "qbfchannel.gap/1"

LOW_THRESHOLD = Fraction(1, 5)
HIGH_THRESHOLD = Fraction(4, 5)

_LOG_BITS = 40


def log2_upper(x: int) -> Fraction:
    """Rational upper bound on ``log2(x)`` (off by at most ~2**-39)."""
    if x < 1:
        raise ValueError("x must be positive")
    if x & (x - 1) == 0:
        return Fraction(x.bit_length() - 1)
    r = Fraction(math.ceil(math.log2(x) * 2**_LOG_BITS) + 1, 2**_LOG_BITS)
    # float error is ~1e-3 at this scale; the +1 keeps us strictly above
    assert float(r) > math.log2(x)
    return r


def transit_alphabet(n: int, m: int) -> int:
    return 6 * m * n + 3


@dataclass(frozen=True)
class CycleStats:
    n: int
    m: int
    beta: Fraction
    p: Fraction
    q: Fraction
    e_cycle: Fraction
    good_dwell: Fraction

    @property
    def occupancy(self) -> Fraction:
        return self.good_dwell / self.e_cycle


@dataclass(frozen=True)
class RateBounds:
    lower: Fraction
    upper: Fraction
    transit_bits: Fraction
    stats: CycleStats

    @property
    def transit_bits_float(self) -> float:
        return math.log2(transit_alphabet(self.stats.n, self.stats.m))


class Verdict(enum.Enum):
    HIGH = "HighCapacity"
    LOW = "LowCapacity"


@dataclass(frozen=True)
class GapDecision:
    verdict: Verdict
    bounds: RateBounds
    policy: DecisionPolicy
    params: ChannelParams

    def to_json(self) -> dict:
        b = self.bounds
        return {
            "schema": GAPDECISION_SCHEMA,
            "verdict": self.verdict.value,
            "lower": _frac(b.lower),
            "lower_approx": float(b.lower),
            "upper": _frac(b.upper),
            "upper_approx": float(b.upper),
            "beta_min": _frac(b.stats.beta),
            "transit_bits": float(b.transit_bits),
            "e_cycle": _frac(b.stats.e_cycle),
            "a_exp": self.params.a_exp,
            "b_exp": self.params.b_exp,
            "witness_policy": self.policy.to_json(),
            "note": "finite-scale certificate: upper bound uses log2(6mn+3) transit bits per pass",
        }


class IndeterminateError(RuntimeError):
    def __init__(self, bounds: RateBounds, hint: Tuple[int, int]):
        self.bounds = bounds
        self.hint = hint
        super().__init__(
            f"bounds [{float(bounds.lower):.6g}, {float(bounds.upper):.6g}] straddle the thresholds; "
            f"try --a-exp {hint[0]} --b-exp {hint[1]}"
        )


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def cycle_stats(n: int, m: int, beta: Fraction, params: ChannelParams) -> CycleStats:
    if params.leak_exp is not None:
        raise UnsupportedSpecError("cycle statistics exclude the good->bad leak")
    beta = Fraction(beta)
    if not 0 <= beta <= 1:
        raise ValueError(f"beta={beta} outside [0, 1]")
    p, q = params.p, params.q
    good = (1 - beta) / p
    e = (2 * n + 1) + good + beta / q
    return CycleStats(n, m, beta, p, q, e, good)


def rate_lower_bound(stats: CycleStats) -> Fraction:
    return stats.good_dwell / stats.e_cycle


def rate_upper_bound(stats: CycleStats) -> Tuple[Fraction, float]:
    """Exact rational upper bound plus its float value."""
    t = log2_upper(transit_alphabet(stats.n, stats.m))
    up = (stats.good_dwell + t) / stats.e_cycle
    return up, float(up)


def rate_bounds(stats: CycleStats) -> RateBounds:
    upper, _ = rate_upper_bound(stats)
    return RateBounds(rate_lower_bound(stats), upper, log2_upper(transit_alphabet(stats.n, stats.m)), stats)


def exponents_pass(
    n: int, m: int, a_exp: int, b_exp: int,
    low: Fraction = LOW_THRESHOLD, high: Fraction = HIGH_THRESHOLD,
) -> bool:
    """Do (a_exp, b_exp) separate the worst true and the best false formula?"""
    params = ChannelParams(a_exp, b_exp)
    true_case = rate_lower_bound(cycle_stats(n, m, Fraction(0), params))
    false_case = rate_upper_bound(cycle_stats(n, m, Fraction(1, m * 2**n), params))[0]
    return true_case > high and false_case < low


def recommended_exponents(n: int, m: int) -> Tuple[int, int]:
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    # one extra bit of margin on each condition
    a = math.ceil(math.log2(20 * (2 * n + 1))) + 1
    gap = math.ceil(math.log2(20 * m * 2**n)) + 1
    while not exponents_pass(n, m, a, a + gap):
        a += 1
        gap += 1
    return a, a + gap


def decide_gap(
    spec: ChannelSpec,
    low: Fraction = LOW_THRESHOLD,
    high: Fraction = HIGH_THRESHOLD,
    solved: Optional[Tuple[Fraction, DecisionPolicy]] = None,
) -> GapDecision:
    spec.require_no_leak()
    beta, pol = solved if solved is not None else optimal_bad_probability(spec)
    bounds = rate_bounds(cycle_stats(spec.n, spec.m, beta, spec.params))
    if bounds.lower > high:
        return GapDecision(Verdict.HIGH, bounds, pol, spec.params)
    if bounds.upper < low:
        return GapDecision(Verdict.LOW, bounds, pol, spec.params)
    raise IndeterminateError(bounds, recommended_exponents(spec.n, spec.m))
