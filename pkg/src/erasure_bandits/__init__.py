"""Multi-armed bandits over arm-erasure channels with per-round erasure feedback.

Simulation library plus a benchmark CLI: stop-on-success batched elimination,
the blind-repetition baseline, channel-oblivious controls, hard-instance
lower-bound probes, and a reproducible experiment harness.
"""

from .channel import (
    AgentState,
    ErasureChannel,
    RoundRecord,
    TransmitResult,
    channel_step,
    transmit_until_success,
)
from .env import (
    BOUNDED_KINDS,
    STREAM_ERASURES,
    STREAM_INSTANCE,
    STREAM_POLICY,
    STREAM_REWARDS,
    BanditInstance,
    RewardKind,
    RngStream,
    draw_reward,
    hard_instance,
    make_instance,
    sample_uniform_means,
)
from .episodes import EpisodeTrace, run_episode
from .harness import (
    AggregateResult,
    ConfigError,
    CurveAggregate,
    ExperimentConfig,
    emit_outputs,
    replication_instance,
    run_experiment,
)
from .lowerbound import (
    HardFamily,
    WorstCaseResult,
    critical_horizon,
    estimate_success_deficit_probability,
    worst_case_regret,
)
from .policies import (
    ADAPTIVE_PREFIX,
    ALGORITHMS,
    BatchedEliminationPolicy,
    LsaePolicy,
    ObliviousSaePolicy,
    PlainSaePolicy,
    Policy,
    PolicyFactory,
    SosSaePolicy,
    UniformRandomPolicy,
    build_policy,
    confidence_width,
    repetition_length,
    surviving_arms,
)

__version__ = "0.1.0"

__all__ = [
    "ADAPTIVE_PREFIX",
    "ALGORITHMS",
    "AgentState",
    "AggregateResult",
    "BOUNDED_KINDS",
    "BanditInstance",
    "BatchedEliminationPolicy",
    "ConfigError",
    "CurveAggregate",
    "EpisodeTrace",
    "ErasureChannel",
    "ExperimentConfig",
    "HardFamily",
    "LsaePolicy",
    "ObliviousSaePolicy",
    "PlainSaePolicy",
    "Policy",
    "PolicyFactory",
    "RewardKind",
    "RngStream",
    "RoundRecord",
    "SosSaePolicy",
    "STREAM_ERASURES",
    "STREAM_INSTANCE",
    "STREAM_POLICY",
    "STREAM_REWARDS",
    "TransmitResult",
    "UniformRandomPolicy",
    "WorstCaseResult",
    "build_policy",
    "channel_step",
    "confidence_width",
    "critical_horizon",
    "draw_reward",
    "emit_outputs",
    "estimate_success_deficit_probability",
    "hard_instance",
    "make_instance",
    "repetition_length",
    "replication_instance",
    "run_episode",
    "run_experiment",
    "sample_uniform_means",
    "surviving_arms",
    "transmit_until_success",
    "worst_case_regret",
]
