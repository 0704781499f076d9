"""Arm-erasure channel and the agent-side fallback rule.

Each round the learner transmits an arm request. The channel erases it
independently with probability epsilon; on an erasure the agent keeps playing
the last successfully received arm, and the learner is told (error-free)
whether the erasure happened.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .env import BanditInstance, draw_reward


class ErasureChannel:
    """i.i.d. Bernoulli(epsilon) erasures; consumes one uniform per round.

    Owns the erasure generator. The round-1 uniform fallback draw is also
    taken from this generator (lazily, only if round 1 is erased) so that
    reward streams stay comparable across algorithms.
    """

    def __init__(self, epsilon: float, rng: np.random.Generator):
        if not 0.0 <= epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        self.epsilon = float(epsilon)
        self.rng = rng


class AgentState:
    """Remote agent holding the last successfully received arm.

    ``held_arm`` stays ``None`` until round 1 resolves: a success pins it to
    the requested arm, an erasure falls back to a uniformly random arm.
    """

    def __init__(self, arm_count: int):
        if arm_count < 2:
            raise ValueError("need at least two arms")
        self.arm_count = int(arm_count)
        self.held_arm: int | None = None

    @property
    def initialized(self) -> bool:
        return self.held_arm is not None


@dataclass
class RoundRecord:
    """One round as both sides experienced it (1-based round index)."""

    t: int
    requested: int
    erased: bool
    played: int
    reward: float


def channel_step(channel: ErasureChannel, agent: AgentState, requested: int) -> tuple[bool, int]:
    """Transmit ``requested`` for one round; return (erased, played).

    On success the agent switches to the requested arm; on an erasure it keeps
    (or, before initialization, uniformly draws) its held arm. The returned
    bit is exactly the feedback the learner observes.
    """
    if not 0 <= requested < agent.arm_count:
        raise ValueError(f"arm {requested} out of range for {agent.arm_count} arms")
    erased = bool(channel.rng.random() < channel.epsilon)
    if erased:
        if agent.held_arm is None:
            agent.held_arm = int(channel.rng.integers(agent.arm_count))
    else:
        agent.held_arm = int(requested)
    return erased, agent.held_arm


@dataclass
class TransmitResult:
    attempts: int
    succeeded: bool
    records: list[RoundRecord] = field(default_factory=list)


def transmit_until_success(
    channel: ErasureChannel,
    agent: AgentState,
    requested: int,
    start_round: int,
    horizon: int,
    instance: BanditInstance | None = None,
    reward_rng: np.random.Generator | None = None,
) -> TransmitResult:
    """Re-send ``requested`` once per round until the feedback bit reports success.

    Stops without success when the horizon runs out (a normal return, not an
    error). Every consumed round still plays whatever arm the agent holds;
    when ``instance`` and ``reward_rng`` are given, each record carries the
    reward that round generated, otherwise rewards are NaN placeholders.
    """
    records: list[RoundRecord] = []
    attempts = 0
    succeeded = False
    t = int(start_round)
    while t <= horizon:
        erased, played = channel_step(channel, agent, requested)
        attempts += 1
        if instance is not None and reward_rng is not None:
            reward = draw_reward(instance, played, reward_rng)
        else:
            reward = math.nan
        records.append(RoundRecord(t=t, requested=requested, erased=erased, played=played, reward=reward))
        t += 1
        if not erased:
            succeeded = True
            break
    return TransmitResult(attempts=attempts, succeeded=succeeded, records=records)
