"""Hard-instance machinery for the high-erasure regret floor.

The hard family puts reward 1 on a single arm and 0 everywhere else. In the
high-erasure regime (epsilon >= 0.5) successful transmissions inside the
critical window of ``ceil(K / (4 (1 - eps)))`` rounds are scarce, so any
policy leaves some family member's good arm untouched often enough to pay
regret proportional to ``K / (1 - eps)``. This module exposes the measurable
pieces: the critical window, the probability of a success-starved window, and
a worst-case-over-the-family policy evaluator.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import ErasureChannel
from .env import (
    STREAM_ERASURES,
    STREAM_POLICY,
    STREAM_REWARDS,
    BanditInstance,
    RngStream,
    hard_instance,
)
from .episodes import run_episode
from .policies import Policy

#: Builds a fresh policy per episode: (arm_count, horizon, rng) -> Policy.
PolicyBuilder = Callable[[int, int, np.random.Generator], Policy]


def critical_horizon(arm_count: int, epsilon: float) -> int:
    """``ceil(K / (4 (1 - eps)))`` with a guard against float round-up.

    Plain ceil would turn e.g. K=16, eps=0.9 into 41 because 1-0.9 is slightly
    below one tenth; a relative slack of 1e-9 restores the mathematical value.
    """
    if arm_count < 2:
        raise ValueError("need at least two arms")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    raw = arm_count / (4.0 * (1.0 - epsilon))
    return math.ceil(raw - 1e-9 * max(1.0, raw))


class HardFamily:
    """The K deterministic one-hot instances plus their critical window."""

    def __init__(self, arm_count: int, epsilon: float):
        if arm_count < 2:
            raise ValueError("need at least two arms")
        if not 0.5 <= epsilon < 1.0:
            raise ValueError("the hard family targets the high-erasure regime: epsilon in [0.5, 1)")
        self.arm_count = int(arm_count)
        self.epsilon = float(epsilon)
        self.critical_horizon = critical_horizon(arm_count, epsilon)
        self.instances: tuple[BanditInstance, ...] = tuple(
            hard_instance(arm_count, best) for best in range(arm_count)
        )


def estimate_success_deficit_probability(
    arm_count: int,
    epsilon: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte Carlo probability that the critical window is success-starved.

    Estimates P[at most K/4 unerased rounds among the first
    ``critical_horizon(K, eps)`` rounds] from ``trials`` independent windows.
    Only the count of successes matters, so each window is drawn as a single
    binomial variate.
    """
    if epsilon < 0.5:
        raise ValueError("the starvation bound is only claimed for epsilon >= 0.5")
    if not epsilon < 1.0:
        raise ValueError("epsilon must lie in [0.5, 1)")
    if trials < 1:
        raise ValueError("need at least one trial")
    window = critical_horizon(arm_count, epsilon)
    successes = rng.binomial(window, 1.0 - epsilon, size=trials)
    return float(np.mean(successes <= arm_count / 4.0))


@dataclass(frozen=True)
class WorstCaseResult:
    """Per-instance mean regrets over the hard family and the worst of them."""

    per_instance: np.ndarray
    worst: float
    worst_instance: int


def _instance_mean_regret(
    policy_builder: PolicyBuilder,
    arm_count: int,
    epsilon: float,
    horizon: int,
    trials: int,
    stream: RngStream,
    best: int,
) -> float:
    instance = hard_instance(arm_count, best)
    total = 0.0
    for trial in range(trials):
        trial_stream = stream.substream(best, trial)
        channel = ErasureChannel(epsilon, trial_stream.substream(STREAM_ERASURES).generator())
        policy = policy_builder(arm_count, horizon, trial_stream.substream(STREAM_POLICY).generator())
        trace = run_episode(
            policy,
            instance,
            channel,
            horizon,
            trial_stream.substream(STREAM_REWARDS).generator(),
        )
        total += trace.final_regret
    return total / trials


def worst_case_regret(
    policy_builder: PolicyBuilder,
    arm_count: int,
    epsilon: float,
    horizon: int,
    trials: int,
    stream: RngStream,
    workers: int = 1,
) -> WorstCaseResult:
    """Mean realized regret of a policy on every hard instance; report the worst.

    Runs ``trials`` independent episodes per instance (fresh channel and
    policy randomness each, derived from ``stream``) and averages the realized
    pseudo-regret, which on these instances equals the number of rounds the
    good arm was not played. Requires ``horizon >= critical_horizon``.
    ``policy_builder`` must be picklable when ``workers > 1``.
    """
    window = critical_horizon(arm_count, epsilon)
    if horizon < window:
        raise ValueError(f"horizon {horizon} is shorter than the critical window {window}")
    if trials < 1:
        raise ValueError("need at least one trial")
    args = [
        (policy_builder, arm_count, epsilon, horizon, trials, stream, best)
        for best in range(arm_count)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            means = list(pool.map(_instance_mean_regret_star, args))
    else:
        means = [_instance_mean_regret_star(a) for a in args]
    per_instance = np.asarray(means)
    worst_instance = int(np.argmax(per_instance))
    return WorstCaseResult(
        per_instance=per_instance,
        worst=float(per_instance[worst_instance]),
        worst_instance=worst_instance,
    )


def _instance_mean_regret_star(args) -> float:
    return _instance_mean_regret(*args)
