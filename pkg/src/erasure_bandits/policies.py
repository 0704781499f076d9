"""Learner-side algorithms behind a common request/observe interface.

All elimination-style learners here share one schedule: batches of growing
size, each active arm getting a per-arm request run made of a *prefix* (rounds
spent making sure the agent actually holds the arm, rewards discarded) and a
*collection* window whose rewards feed that arm's batch estimate. They differ
only in the prefix rule:

* ``SosSaePolicy``   - re-send until the feedback bit acknowledges delivery.
* ``LsaePolicy``     - blind repetition for a fixed count derived from the
                       (known) erasure probability; ignores feedback.
* ``PlainSaePolicy`` - fixed prefix of one round (the clean-channel special
                       case of stop-on-success).
* ``ObliviousSaePolicy`` - no prefix at all; trusts every reward to be from
  the requested arm, which goes wrong under erasures.
"""

import math
from dataclasses import dataclass
from typing import Callable, ClassVar

import numpy as np

#: Prefix rule sentinel: re-send until acknowledged instead of a fixed count.
ADAPTIVE_PREFIX = -1

PHASE_TRANSMIT = "transmit"
PHASE_COLLECT = "collect"
PHASE_COMMITTED = "committed"


class Policy:
    """Round-driven learner.

    ``next_request(t)`` picks the arm to transmit at round ``t``;
    ``observe(t, played, reward, erased)`` consumes the round's outcome. For
    policies with ``is_feedback_user = False`` the episode loop masks
    ``played`` and ``erased`` to ``None``: such learners cannot, even by
    accident, read the channel feedback.
    """

    is_feedback_user: ClassVar[bool] = False
    arm_count: int
    overhead_rounds: int = 0

    def next_request(self, t: int) -> int:
        raise NotImplementedError

    def observe(self, t: int, played: int | None, reward: float, erased: bool | None) -> None:
        raise NotImplementedError


def confidence_width(samples: int, arm_count: int, horizon: int) -> float:
    """Elimination threshold ``4 * sqrt(ln(K*T) / (2*m))`` for batch means on ``m`` samples."""
    if samples < 1 or arm_count < 1 or horizon < 1:
        raise ValueError("samples, arm_count and horizon must be positive")
    if arm_count * horizon < 2:
        raise ValueError("arm_count * horizon must be at least 2")
    return 4.0 * math.sqrt(math.log(arm_count * horizon) / (2.0 * samples))


def repetition_length(horizon: int, epsilon: float) -> int:
    """Blind repetition count ``max(1, ceil(2 ln T / ln(1/eps)))``.

    Long enough that a run of repeats delivers at least one success with
    probability 1 - 1/T^2 per run; clamps to one round on a clean channel.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    if epsilon == 0.0:
        return 1
    return max(1, math.ceil(2.0 * math.log(horizon) / math.log(1.0 / epsilon)))


def surviving_arms(batch_means: dict[int, float], width: float) -> list[int]:
    """Arms within ``width`` of the batch's empirical leader, original order kept."""
    leader = max(batch_means.values())
    return [arm for arm, mean in batch_means.items() if leader - mean <= width]


class BatchedEliminationPolicy(Policy):
    """Batched elimination: each active arm is sampled ``4**i`` times in batch ``i``.

    Per (batch, arm): a prefix of ``prefix_rule`` discarded rounds
    (``ADAPTIVE_PREFIX`` = until acknowledged), then ``4**i`` recorded rounds.
    At the batch boundary, arms falling more than ``confidence_width`` below
    the empirical leader are dropped; once a single arm survives the policy
    commits to it for the rest of the horizon.

    Batch means use only that batch's recorded rewards. Prefix rounds never
    feed an estimate, even though the learner may know which arm produced them.
    """

    def __init__(self, arm_count: int, horizon: int, prefix_rule: int):
        if arm_count < 2:
            raise ValueError("need at least two arms")
        if horizon < 1:
            raise ValueError("horizon must be positive")
        if prefix_rule < 0 and prefix_rule != ADAPTIVE_PREFIX:
            raise ValueError("prefix_rule must be >= 0 or ADAPTIVE_PREFIX")
        self.arm_count = int(arm_count)
        self.horizon = int(horizon)
        self.prefix_rule = int(prefix_rule)
        self.active: list[int] = list(range(arm_count))
        self.batch_index = 1
        self.batch_size = 4
        self.committed: int | None = None
        self.overhead_rounds = 0
        #: arm -> batch at whose end it was eliminated
        self.eliminated_in_batch: dict[int, int] = {}
        #: (batch index, survivors) after each completed batch
        self.batch_log: list[tuple[int, tuple[int, ...]]] = []
        self._cursor = 0
        self._batch_means: dict[int, float] = {}
        self._start_arm()

    # -- schedule state ------------------------------------------------------

    def _start_arm(self) -> None:
        self.current_arm = self.active[self._cursor]
        self._chunks: list = []
        self.collect_left = self.batch_size
        if self.prefix_rule == ADAPTIVE_PREFIX:
            self.phase = PHASE_TRANSMIT
            self.prefix_left: int | None = None
        elif self.prefix_rule > 0:
            self.phase = PHASE_TRANSMIT
            self.prefix_left = self.prefix_rule
        else:
            self.phase = PHASE_COLLECT
            self.prefix_left = None

    def _finish_arm(self) -> None:
        chunks = self._chunks
        if chunks and isinstance(chunks[0], np.ndarray):
            arr = chunks[0] if len(chunks) == 1 else np.concatenate(chunks)
        else:
            arr = np.asarray(chunks, dtype=np.float64)
        self._batch_means[self.current_arm] = float(np.sum(arr)) / self.batch_size
        self._cursor += 1
        if self._cursor == len(self.active):
            self._end_batch()
        else:
            self._start_arm()

    def _end_batch(self) -> None:
        width = confidence_width(self.batch_size, self.arm_count, self.horizon)
        survivors = surviving_arms(self._batch_means, width)
        for arm in self.active:
            if arm not in survivors:
                self.eliminated_in_batch[arm] = self.batch_index
        self.batch_log.append((self.batch_index, tuple(survivors)))
        self.active = survivors
        self.batch_index += 1
        self.batch_size = 4**self.batch_index
        self._batch_means = {}
        self._cursor = 0
        if len(self.active) == 1:
            self.committed = self.active[0]
            self.current_arm = self.committed
            self.phase = PHASE_COMMITTED
        else:
            self._start_arm()

    # -- round-by-round interface --------------------------------------------

    def next_request(self, t: int) -> int:
        return self.current_arm

    def observe(self, t: int, played: int | None, reward: float, erased: bool | None) -> None:
        if self.phase == PHASE_COMMITTED:
            return
        if self.phase == PHASE_TRANSMIT:
            self.overhead_rounds += 1
            if self.prefix_rule == ADAPTIVE_PREFIX:
                if not erased:
                    self.phase = PHASE_COLLECT
            else:
                self.prefix_left -= 1
                if self.prefix_left == 0:
                    self.phase = PHASE_COLLECT
            return
        self._chunks.append(reward)
        self.collect_left -= 1
        if self.collect_left == 0:
            self._finish_arm()

    # -- bulk hooks (used by the segmented episode engine) ---------------------

    def consume_prefix_rounds(self, n: int) -> None:
        """Advance a fixed prefix by ``n`` rounds (rewards discarded)."""
        self.overhead_rounds += n
        self.prefix_left -= n
        if self.prefix_left == 0:
            self.phase = PHASE_COLLECT

    def consume_collect_block(self, rewards: np.ndarray) -> None:
        """Record a contiguous block of collection rewards for the current arm."""
        self._chunks.append(rewards)
        self.collect_left -= len(rewards)
        if self.collect_left == 0:
            self._finish_arm()


class SosSaePolicy(BatchedEliminationPolicy):
    """Stop-on-success elimination: re-send each arm until the ACK bit confirms
    delivery, then record the batch's rewards. Needs no knowledge of the
    erasure probability."""

    is_feedback_user = True

    def __init__(self, arm_count: int, horizon: int):
        super().__init__(arm_count, horizon, ADAPTIVE_PREFIX)


class LsaePolicy(BatchedEliminationPolicy):
    """Feedback-free elimination that blindly repeats each arm before collecting.

    The repetition count comes from the known erasure probability; the channel
    feedback bit is never consulted.
    """

    def __init__(self, arm_count: int, horizon: int, epsilon: float):
        self.repetitions = repetition_length(horizon, epsilon)
        super().__init__(arm_count, horizon, self.repetitions)


class PlainSaePolicy(BatchedEliminationPolicy):
    """Elimination for a clean channel: one-round prefix, no feedback use.

    Exactly the epsilon = 0 specialization of stop-on-success, so the two
    produce bit-identical traces on an erasure-free channel.
    """

    def __init__(self, arm_count: int, horizon: int):
        super().__init__(arm_count, horizon, 1)


class ObliviousSaePolicy(BatchedEliminationPolicy):
    """Elimination that ignores the channel entirely: every reward is credited
    to the requested arm. Under erasures the estimates are contaminated by
    rewards of whatever arm the agent was still holding."""

    def __init__(self, arm_count: int, horizon: int):
        super().__init__(arm_count, horizon, 0)


class UniformRandomPolicy(Policy):
    """Requests a uniformly random arm every round; learns nothing."""

    def __init__(self, arm_count: int, rng: np.random.Generator):
        if arm_count < 2:
            raise ValueError("need at least two arms")
        self.arm_count = int(arm_count)
        self.overhead_rounds = 0
        self._rng = rng

    def next_request(self, t: int) -> int:
        return int(self._rng.integers(self.arm_count))

    def observe(self, t: int, played: int | None, reward: float, erased: bool | None) -> None:
        pass


#: Algorithm names accepted by the experiment harness.
ALGORITHMS = ("sos_sae", "lsae", "sae", "oblivious_sae")


def build_policy(
    name: str,
    arm_count: int,
    horizon: int,
    epsilon: float | None = None,
    rng: np.random.Generator | None = None,
) -> Policy:
    """Construct a policy by registry name.

    ``epsilon`` is required for ``lsae`` (it is the one algorithm that needs
    the erasure probability up front); ``rng`` is required for
    ``uniform_random``.
    """
    if name == "sos_sae":
        return SosSaePolicy(arm_count, horizon)
    if name == "lsae":
        if epsilon is None:
            raise ValueError("lsae requires the erasure probability")
        return LsaePolicy(arm_count, horizon, epsilon)
    if name == "sae":
        return PlainSaePolicy(arm_count, horizon)
    if name == "oblivious_sae":
        return ObliviousSaePolicy(arm_count, horizon)
    if name == "uniform_random":
        if rng is None:
            raise ValueError("uniform_random requires a generator")
        return UniformRandomPolicy(arm_count, rng)
    raise ValueError(f"unknown policy {name!r}")


@dataclass(frozen=True)
class PolicyFactory:
    """Picklable builder producing a fresh policy per episode."""

    name: str
    epsilon: float | None = None

    def __call__(self, arm_count: int, horizon: int, rng: np.random.Generator) -> Policy:
        return build_policy(self.name, arm_count, horizon, epsilon=self.epsilon, rng=rng)
