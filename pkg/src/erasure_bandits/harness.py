"""Experiment orchestration: replications, aggregation, and file outputs.

A run sweeps (algorithm, epsilon) pairs over seeded replications. Within a
replication every algorithm and every epsilon faces the identical instance and
the identical reward stream (rewards are indexed by round, so two algorithms
playing the same arm at the same round see the same reward), and all
algorithms share the erasure stream of their epsilon; curves are therefore
paired and their differences low-variance. Aggregation is a deterministic
reduction by replication index, so worker parallelism never changes output.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ErasureChannel
from .env import (
    STREAM_ERASURES,
    STREAM_INSTANCE,
    STREAM_REWARDS,
    BanditInstance,
    RewardKind,
    RngStream,
    hard_instance,
    make_instance,
    sample_uniform_means,
)
from .episodes import run_episode
from .policies import ALGORITHMS, build_policy


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 1)."""


@dataclass
class ExperimentConfig:
    """Everything that determines an experiment byte-for-byte (except runtime)."""

    arm_count: int = 50
    horizon: int = 1_000_000
    epsilons: tuple[float, ...] = (0.5, 0.9, 0.95)
    algorithms: tuple[str, ...] = ("sos_sae", "lsae")
    replications: int = 100
    reward_kind: RewardKind = RewardKind.GAUSSIAN_UNIT_VARIANCE
    mean_spec: str = "uniform"
    shuffle_arms: bool = True
    seed: int = 0
    output_dir: Path = Path("results")
    stride: int | None = None
    plot: bool = False
    plot_until: int | None = None
    workers: int = 1

    def __post_init__(self):
        self.epsilons = tuple(float(e) for e in self.epsilons)
        self.algorithms = tuple(self.algorithms)
        self.reward_kind = RewardKind(self.reward_kind)
        self.output_dir = Path(self.output_dir)

    @property
    def effective_stride(self) -> int:
        if self.stride is not None:
            return self.stride
        target = max(1, self.horizon // 1000)
        while self.horizon % target:
            target -= 1
        return target

    def validate(self) -> None:
        if self.arm_count < 2:
            raise ConfigError("arms must be at least 2")
        if self.horizon < 1:
            raise ConfigError("horizon must be positive")
        if not self.epsilons:
            raise ConfigError("need at least one erasure probability")
        for eps in self.epsilons:
            if not 0.0 <= eps < 1.0:
                raise ConfigError(f"epsilon {eps} outside [0, 1)")
        if not self.algorithms:
            raise ConfigError("need at least one algorithm")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if self.stride is not None:
            if self.stride < 1:
                raise ConfigError("stride must be positive")
            if self.horizon % self.stride:
                raise ConfigError(f"stride {self.stride} does not divide horizon {self.horizon}")
        if self.plot_until is not None and self.plot_until < 1:
            raise ConfigError("plot-until must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        base_means(self)  # raises ConfigError on a bad means spec

    def to_mapping(self) -> dict:
        return {
            "arms": self.arm_count,
            "horizon": self.horizon,
            "epsilons": list(self.epsilons),
            "algorithms": list(self.algorithms),
            "replications": self.replications,
            "kind": self.reward_kind.value,
            "means": self.mean_spec,
            "shuffle": self.shuffle_arms,
            "seed": self.seed,
            "out": str(self.output_dir),
            "stride": self.effective_stride,
            "plot": self.plot,
            "plot_until": self.plot_until,
            "workers": self.workers,
        }


def base_means(config: ExperimentConfig) -> np.ndarray | None:
    """Resolve the means spec; ``None`` means fresh uniform draws per replication."""
    spec = config.mean_spec.strip()
    if spec == "uniform":
        return None
    if spec.startswith("hard:"):
        try:
            best = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad hard-instance spec {spec!r}") from exc
        if not 0 <= best < config.arm_count:
            raise ConfigError(f"hard-instance arm {best} out of range for {config.arm_count} arms")
        return hard_instance(config.arm_count, best).means.copy()
    try:
        means = np.array([float(tok) for tok in spec.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad means spec {spec!r}") from exc
    if means.shape[0] != config.arm_count:
        raise ConfigError(f"means spec lists {means.shape[0]} arms but config has {config.arm_count}")
    return means


def replication_instance(config: ExperimentConfig, replication: int) -> BanditInstance:
    """The instance all algorithms face in this replication (post-shuffle)."""
    gen = RngStream(config.seed).substream(STREAM_INSTANCE, replication).generator()
    means = base_means(config)
    if means is None:
        means = sample_uniform_means(config.arm_count, gen)
    if config.shuffle_arms:
        means = gen.permutation(means)
    try:
        return make_instance(config.reward_kind, means)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _replication_worker(args: tuple[ExperimentConfig, int]) -> tuple[np.ndarray, np.ndarray]:
    """All (algorithm, epsilon) episodes of one replication.

    Returns (curves, finals) with one row per pair, ordered algorithm-major
    then epsilon, matching ``run_experiment``'s aggregation order.
    """
    config, replication = args
    instance = replication_instance(config, replication)
    root = RngStream(config.seed)
    stride = config.effective_stride
    n_points = -(-config.horizon // stride)
    curves = np.empty((len(config.algorithms) * len(config.epsilons), n_points))
    finals = np.empty(curves.shape[0])
    row = 0
    for algorithm in config.algorithms:
        for eps_index, epsilon in enumerate(config.epsilons):
            channel = ErasureChannel(
                epsilon, root.substream(STREAM_ERASURES, replication, eps_index).generator()
            )
            policy = build_policy(algorithm, config.arm_count, config.horizon, epsilon=epsilon)
            trace = run_episode(
                policy,
                instance,
                channel,
                config.horizon,
                root.substream(STREAM_REWARDS, replication).generator(),
                stride=stride,
            )
            curves[row] = trace.regret_curve
            finals[row] = trace.final_regret
            row += 1
    return curves, finals


@dataclass
class CurveAggregate:
    """Mean/stderr regret curve of one (algorithm, epsilon) pair plus the raw finals."""

    algorithm: str
    epsilon: float
    mean: np.ndarray
    stderr: np.ndarray
    finals: np.ndarray


@dataclass
class AggregateResult:
    config: ExperimentConfig
    checkpoints: np.ndarray
    curves: list[CurveAggregate] = field(default_factory=list)
    runtime_seconds: float = 0.0

    def curve(self, algorithm: str, epsilon: float) -> CurveAggregate:
        for curve in self.curves:
            if curve.algorithm == algorithm and curve.epsilon == float(epsilon):
                return curve
        raise KeyError(f"no curve for ({algorithm}, {epsilon})")


def run_experiment(config: ExperimentConfig) -> AggregateResult:
    """Run all replications and aggregate mean and standard error per curve."""
    config.validate()
    started = time.perf_counter()
    jobs = [(config, replication) for replication in range(config.replications)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_replication_worker, jobs))
    else:
        outcomes = [_replication_worker(job) for job in jobs]
    all_curves = np.stack([curves for curves, _ in outcomes])  # (reps, pairs, points)
    all_finals = np.stack([finals for _, finals in outcomes])  # (reps, pairs)
    reps = config.replications
    mean = all_curves.mean(axis=0)
    if reps > 1:
        stderr = all_curves.std(axis=0, ddof=1) / np.sqrt(reps)
    else:
        stderr = np.zeros_like(mean)
    stride = config.effective_stride
    checkpoints = np.arange(stride, config.horizon + 1, stride, dtype=np.int64)
    if checkpoints.size == 0 or checkpoints[-1] != config.horizon:
        checkpoints = np.append(checkpoints, np.int64(config.horizon))
    curves = []
    row = 0
    for algorithm in config.algorithms:
        for epsilon in config.epsilons:
            curves.append(
                CurveAggregate(
                    algorithm=algorithm,
                    epsilon=epsilon,
                    mean=mean[row],
                    stderr=stderr[row],
                    finals=all_finals[:, row],
                )
            )
            row += 1
    return AggregateResult(
        config=config,
        checkpoints=checkpoints,
        curves=curves,
        runtime_seconds=time.perf_counter() - started,
    )


CSV_HEADER = "t,algorithm,epsilon,mean_regret,stderr_regret,replications"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_outputs(result: AggregateResult) -> dict[str, Path]:
    """Write the delimited curves, the JSON run summary, and optional figures.

    The CSV is byte-deterministic for a given config and seed; the JSON echoes
    the config and adds wall-clock runtime. Returns the written paths.
    """
    config = result.config
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    csv_path = out_dir / "regret_curves.csv"
    lines = [CSV_HEADER]
    for curve in result.curves:
        eps_text = _fmt(curve.epsilon)
        for j, t in enumerate(result.checkpoints):
            lines.append(
                f"{int(t)},{curve.algorithm},{eps_text},"
                f"{_fmt(curve.mean[j])},{_fmt(curve.stderr[j])},{config.replications}"
            )
    csv_path.write_text("\n".join(lines) + "\n")
    written["csv"] = csv_path

    summary = {
        "config": config.to_mapping(),
        "runtime_seconds": result.runtime_seconds,
        "results": [
            {
                "algorithm": curve.algorithm,
                "epsilon": curve.epsilon,
                "final_mean": float(curve.mean[-1]),
                "final_stderr": float(curve.stderr[-1]),
                "replications": config.replications,
                "final_per_replication": [float(x) for x in curve.finals],
            }
            for curve in result.curves
        ],
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written["summary"] = summary_path

    if config.plot:
        from . import plotting  # deferred: pulls in matplotlib

        written.update(plotting.render_regret_figure(result, out_dir, until=config.plot_until))
    return written
