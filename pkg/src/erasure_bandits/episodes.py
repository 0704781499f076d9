"""Episode execution: one policy against one channel/instance for T rounds.

Two interchangeable engines drive an episode:

* ``rounds``   - the reference loop, one policy/channel/reward step per round.
* ``segments`` - a vectorized engine for the batched elimination policies that
  processes whole request runs at once.

Both consume randomness identically (one erasure uniform per round, one reward
draw per round for stochastic instances) and produce bit-identical traces,
regret curves, and policy end states; the test suite asserts this exactly.
The only licensed shortcut: once a policy has committed and the agent holds
the committed arm, the remaining rounds are deterministic, so the segment
engine skips their draws when no per-round records are requested (nothing
downstream of an episode reads those streams).
"""

from dataclasses import dataclass

import numpy as np

from .channel import AgentState, ErasureChannel, RoundRecord, channel_step
from .env import BanditInstance, RewardKind, draw_reward
from .policies import ADAPTIVE_PREFIX, PHASE_TRANSMIT, BatchedEliminationPolicy, Policy


@dataclass(eq=False)
class EpisodeTrace:
    """Outcome of one episode.

    ``regret_curve`` holds cumulative pseudo-regret (gap sums over the arms
    actually played) sampled at ``checkpoints``; the last checkpoint is always
    the horizon. ``rounds`` is populated only when per-round recording was
    requested.
    """

    horizon: int
    checkpoints: np.ndarray
    regret_curve: np.ndarray
    final_regret: float
    transmit_rounds: int
    active_set: tuple[int, ...] | None
    committed_arm: int | None
    rounds: list[RoundRecord] | None


def _checkpoints(horizon: int, stride: int) -> np.ndarray:
    marks = np.arange(stride, horizon + 1, stride, dtype=np.int64)
    if marks.size == 0 or marks[-1] != horizon:
        marks = np.append(marks, np.int64(horizon))
    return marks


class _RegretLedger:
    """Cumulative gap ledger with checkpoint snapshots.

    ``add_block`` reproduces the exact float64 values of one ``add_scalar``
    call per round (cumsum accumulates left to right), which is what makes the
    two engines bit-identical.
    """

    def __init__(self, horizon: int, stride: int):
        self.checkpoints = _checkpoints(horizon, stride)
        self.values = np.zeros(self.checkpoints.shape[0])
        self.cum = 0.0
        self.t = 0
        self._next = 0

    def add_scalar(self, gap: float) -> None:
        self.t += 1
        self.cum = float(self.cum + gap)
        if self._next < self.checkpoints.shape[0] and self.checkpoints[self._next] == self.t:
            self.values[self._next] = self.cum
            self._next += 1

    def add_block(self, gaps: np.ndarray) -> None:
        running = np.cumsum(np.concatenate(((self.cum,), gaps)))
        end = self.t + gaps.shape[0]
        while self._next < self.checkpoints.shape[0] and self.checkpoints[self._next] <= end:
            self.values[self._next] = running[self.checkpoints[self._next] - self.t]
            self._next += 1
        self.cum = float(running[-1])
        self.t = end


def _step_round(policy, instance, channel, agent, t, reward_rng, ledger, records) -> None:
    """One canonical round; both engines funnel single rounds through here."""
    requested = policy.next_request(t)
    erased, played = channel_step(channel, agent, requested)
    reward = draw_reward(instance, played, reward_rng)
    if policy.is_feedback_user:
        policy.observe(t, played, reward, erased)
    else:
        # Masked view: non-feedback learners never see what was played or
        # whether the round was erased.
        policy.observe(t, None, reward, None)
    ledger.add_scalar(instance.gaps[played])
    if records is not None:
        records.append(RoundRecord(t=t, requested=requested, erased=erased, played=played, reward=reward))


def _run_per_round(policy, instance, channel, agent, horizon, reward_rng, ledger, records) -> None:
    for t in range(1, horizon + 1):
        _step_round(policy, instance, channel, agent, t, reward_rng, ledger, records)


def _block_rewards(kind: RewardKind, mu_played: np.ndarray, reward_rng) -> np.ndarray:
    """Reward block for a run of rounds; one draw per round, matching the scalar path."""
    if kind is RewardKind.DETERMINISTIC:
        return mu_played
    if kind is RewardKind.BERNOULLI:
        return (reward_rng.random(mu_played.shape[0]) < mu_played).astype(np.float64)
    return mu_played + reward_rng.standard_normal(mu_played.shape[0])


def _run_segmented(policy, instance, channel, agent, horizon, reward_rng, ledger, records) -> None:
    means = instance.means
    gaps = instance.gaps
    kind = instance.kind
    epsilon = channel.epsilon
    erasure_rng = channel.rng
    t = 0
    while t < horizon:
        # Round 1 resolves individually so the lazy uniform fallback draw
        # stays ordered directly after the first erasure bit.
        if agent.held_arm is None:
            _step_round(policy, instance, channel, agent, t + 1, reward_rng, ledger, records)
            t += 1
            continue
        if policy.committed is not None:
            committed = policy.committed
            while t < horizon and agent.held_arm != committed:
                _step_round(policy, instance, channel, agent, t + 1, reward_rng, ledger, records)
                t += 1
            if t >= horizon:
                break
            n = horizon - t
            ledger.add_block(np.full(n, gaps[committed]))
            if records is not None:
                erased = erasure_rng.random(n) < epsilon
                rewards = _block_rewards(kind, np.full(n, means[committed]), reward_rng)
                for i in range(n):
                    records.append(
                        RoundRecord(t + 1 + i, committed, bool(erased[i]), committed, float(rewards[i]))
                    )
            t = horizon
        elif policy.phase == PHASE_TRANSMIT and policy.prefix_rule == ADAPTIVE_PREFIX:
            # Stop-on-success transmit: length is channel-adaptive, so this
            # stays a per-round scan (a handful of rounds per run).
            _step_round(policy, instance, channel, agent, t + 1, reward_rng, ledger, records)
            t += 1
        else:
            # Fixed-length run: a blind prefix or a collection window. The
            # request is constant, so the only dynamics are "held arm until
            # the run's first success, then the requested arm".
            in_prefix = policy.phase == PHASE_TRANSMIT
            remaining = policy.prefix_left if in_prefix else policy.collect_left
            n = min(remaining, horizon - t)
            arm = policy.current_arm
            held = agent.held_arm
            erased = erasure_rng.random(n) < epsilon
            successes = np.flatnonzero(~erased)
            first_success = int(successes[0]) if successes.size else n
            if held == arm:
                mu_played = np.full(n, means[arm])
                gap_block = np.full(n, gaps[arm])
            else:
                before = np.arange(n) < first_success
                mu_played = np.where(before, means[held], means[arm])
                gap_block = np.where(before, gaps[held], gaps[arm])
            rewards = _block_rewards(kind, mu_played, reward_rng)
            if first_success < n:
                agent.held_arm = arm
            ledger.add_block(gap_block)
            if records is not None:
                for i in range(n):
                    played = held if i < first_success else arm
                    records.append(RoundRecord(t + 1 + i, arm, bool(erased[i]), int(played), float(rewards[i])))
            if in_prefix:
                policy.consume_prefix_rounds(n)
            else:
                policy.consume_collect_block(rewards)
            t += n


def run_episode(
    policy: Policy,
    instance: BanditInstance,
    channel: ErasureChannel,
    horizon: int,
    reward_rng: np.random.Generator,
    *,
    stride: int | None = None,
    record_rounds: bool = False,
    engine: str = "auto",
) -> EpisodeTrace:
    """Run one episode of ``horizon`` rounds and return its trace.

    Per round: the policy requests an arm, the channel resolves it, the played
    arm's reward is drawn, the policy observes (with channel fields masked for
    non-feedback policies), and the played arm's gap accrues to the regret
    ledger. ``stride`` controls the regret-curve sampling grid (defaults to a
    single point at the horizon). ``engine`` is ``auto``, ``rounds``, or
    ``segments``.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if instance.arm_count != policy.arm_count:
        raise ValueError(
            f"instance has {instance.arm_count} arms but policy expects {policy.arm_count}"
        )
    if stride is None:
        stride = horizon
    if stride < 1:
        raise ValueError("stride must be positive")
    if engine == "auto":
        engine = "segments" if isinstance(policy, BatchedEliminationPolicy) else "rounds"
    ledger = _RegretLedger(horizon, stride)
    agent = AgentState(instance.arm_count)
    records: list[RoundRecord] | None = [] if record_rounds else None
    if engine == "segments":
        if not isinstance(policy, BatchedEliminationPolicy):
            raise ValueError("the segment engine only drives batched elimination policies")
        _run_segmented(policy, instance, channel, agent, horizon, reward_rng, ledger, records)
    elif engine == "rounds":
        _run_per_round(policy, instance, channel, agent, horizon, reward_rng, ledger, records)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    active = getattr(policy, "active", None)
    return EpisodeTrace(
        horizon=horizon,
        checkpoints=ledger.checkpoints,
        regret_curve=ledger.values,
        final_regret=ledger.cum,
        transmit_rounds=policy.overhead_rounds,
        active_set=tuple(active) if active is not None else None,
        committed_arm=getattr(policy, "committed", None),
        rounds=records,
    )
