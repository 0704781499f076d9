"""Bandit instances, reward sampling, and seed-derived random streams."""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class RewardKind(Enum):
    """Reward distribution family; the per-arm mean is the full parameterization."""

    BERNOULLI = "bernoulli"
    GAUSSIAN_UNIT_VARIANCE = "gaussian"
    DETERMINISTIC = "deterministic"


#: Kinds whose means (and rewards) must stay inside [0, 1].
BOUNDED_KINDS = frozenset({RewardKind.BERNOULLI, RewardKind.DETERMINISTIC})

# Purpose tags for substream derivation. Keeping each consumer on its own
# substream means changing one of them never perturbs the draws of another.
STREAM_INSTANCE = 0
STREAM_REWARDS = 1
STREAM_ERASURES = 2
STREAM_POLICY = 3


@dataclass(frozen=True)
class RngStream:
    """Seed recipe: a root seed plus a derivation key.

    A stream is a *description* of a generator, not the generator itself:
    ``generator()`` always starts from the same state, so two calls replay the
    identical sequence. Use ``substream`` to derive statistically independent
    child streams (rewards, erasures, instance draws, policy randomness).
    """

    seed: int
    key: tuple[int, ...] = ()

    def substream(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.key))


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """K-armed instance: reward kind, per-arm means, best arm, and gaps.

    Construct through :func:`make_instance` (or :func:`hard_instance`); the
    arrays are frozen so an instance can be shared across episodes.
    """

    kind: RewardKind
    means: np.ndarray
    best_arm: int
    gaps: np.ndarray

    @property
    def arm_count(self) -> int:
        return int(self.means.shape[0])


def make_instance(kind: RewardKind | str, means) -> BanditInstance:
    """Build an instance from per-arm means.

    The best arm is the argmax of the means with ties broken toward the lowest
    index, and ``gaps[i] = max(means) - means[i]``.
    """
    kind = RewardKind(kind)
    arr = np.array(means, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError("a bandit instance needs at least two arm means")
    if not np.all(np.isfinite(arr)):
        raise ValueError("arm means must be finite")
    if kind in BOUNDED_KINDS and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{kind.value} means must lie in [0, 1]")
    best_arm = int(np.argmax(arr))
    gaps = arr[best_arm] - arr
    arr.flags.writeable = False
    gaps.flags.writeable = False
    return BanditInstance(kind=kind, means=arr, best_arm=best_arm, gaps=gaps)


def sample_uniform_means(arm_count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``arm_count`` i.i.d. Uniform[0, 1) arm means."""
    if arm_count < 2:
        raise ValueError("need at least two arms")
    return rng.random(arm_count)


def draw_reward(instance: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    """Sample one reward for ``arm``.

    Consumes exactly one draw from ``rng`` for stochastic kinds and none for
    deterministic instances; episode pairing across algorithms relies on this
    one-draw-per-round contract.
    """
    if not 0 <= arm < instance.arm_count:
        raise ValueError(f"arm {arm} out of range for {instance.arm_count} arms")
    mean = instance.means[arm]
    if instance.kind is RewardKind.DETERMINISTIC:
        return float(mean)
    if instance.kind is RewardKind.BERNOULLI:
        return 1.0 if rng.random() < mean else 0.0
    return float(mean + rng.standard_normal())


def hard_instance(arm_count: int, best: int) -> BanditInstance:
    """Deterministic instance with reward 1 at ``best`` and 0 elsewhere."""
    if arm_count < 2:
        raise ValueError("need at least two arms")
    if not 0 <= best < arm_count:
        raise ValueError(f"best arm {best} out of range for {arm_count} arms")
    means = np.zeros(arm_count)
    means[best] = 1.0
    return make_instance(RewardKind.DETERMINISTIC, means)
