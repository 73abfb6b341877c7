"""QBF-to-Markov-channel reduction with exact capacity-gap certificates."""

from .analysis import (
    CycleStats,
    GapDecision,
    IndeterminateError,
    RateBounds,
    Verdict,
    cycle_stats,
    decide_gap,
    rate_lower_bound,
    rate_upper_bound,
    recommended_exponents,
)
from .channel import ChannelInput, ChannelOutput, ChannelSim, PassRecord
from .policy import (
    DecisionPolicy,
    PassAnalysis,
    enumerate_policies,
    optimal_bad_probability,
    pass_bad_probability,
    strategy_policy,
)
from .qbf import Clause, QbfFormula, Quantifier, check_strategy, evaluate_qbf, parse_qdimacs, serialize_qdimacs
from .reduction import ChannelParams, ChannelSpec, Decision, Label, State, build_channel, observe, transition
from .sim import MonteCarloReport, RelayReport, monte_carlo, relay_bits

__version__ = "0.1.0"

__all__ = [
    "CycleStats",
    "GapDecision",
    "IndeterminateError",
    "RateBounds",
    "Verdict",
    "cycle_stats",
    "decide_gap",
    "rate_lower_bound",
    "rate_upper_bound",
    "recommended_exponents",
    "ChannelInput",
    "ChannelOutput",
    "ChannelSim",
    "PassRecord",
    "DecisionPolicy",
    "PassAnalysis",
    "enumerate_policies",
    "optimal_bad_probability",
    "pass_bad_probability",
    "strategy_policy",
    "Clause",
    "QbfFormula",
    "Quantifier",
    "check_strategy",
    "evaluate_qbf",
    "parse_qdimacs",
    "serialize_qdimacs",
    "ChannelParams",
    "ChannelSpec",
    "Decision",
    "Label",
    "State",
    "build_channel",
    "observe",
    "transition",
    "MonteCarloReport",
    "RelayReport",
    "monte_carlo",
    "relay_bits",
]
