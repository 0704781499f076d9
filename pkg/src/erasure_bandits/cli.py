"""Command-line experiment runner.

Exit codes: 0 success, 1 configuration error, 2 I/O error while writing
outputs. Settings come from an optional flat key=value config file with CLI
flags taking precedence.
"""

import argparse
import sys
from pathlib import Path

from .harness import ConfigError, ExperimentConfig, emit_outputs, run_experiment

#: config-file keys, in the same vocabulary as the CLI flags
CONFIG_KEYS = (
    "arms",
    "horizon",
    "epsilon",
    "algos",
    "reps",
    "kind",
    "means",
    "shuffle",
    "seed",
    "out",
    "stride",
    "plot",
    "plot_until",
    "workers",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasure-bandits",
        description="Benchmark bandit algorithms over an arm-erasure channel with per-round feedback.",
    )
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--arms", type=int, help="number of arms K")
    parser.add_argument("--horizon", type=int, help="rounds per episode T")
    parser.add_argument("--epsilon", help="comma-separated erasure probabilities, e.g. 0.5,0.9,0.95")
    parser.add_argument("--algos", help="comma-separated algorithms: sos_sae,lsae,sae,oblivious_sae")
    parser.add_argument("--reps", type=int, help="number of replications")
    parser.add_argument("--kind", help="reward kind: gaussian, bernoulli, or deterministic")
    parser.add_argument("--means", help="'uniform', 'hard:<arm>', or comma-separated per-arm means")
    parser.add_argument(
        "--no-shuffle", action="store_true", default=None, help="do not shuffle arms per replication"
    )
    parser.add_argument("--seed", type=int, help="root seed")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--stride", type=int, help="regret-curve snapshot stride (must divide T)")
    parser.add_argument("--plot", action="store_true", default=None, help="also render SVG/PNG figures")
    parser.add_argument("--plot-until", type=int, help="truncate the plotted horizon (plot only)")
    parser.add_argument("--workers", type=int, help="parallel replication workers")
    return parser


def parse_config_file(path: Path) -> dict[str, str]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_list(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def assemble_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values = parse_config_file(args.config) if args.config else {}

    def pick(flag, key: str, convert=lambda x: x):
        if flag is not None:
            return flag
        if key in file_values:
            return convert(file_values[key])
        return None

    def parse_epsilons(text: str) -> tuple[float, ...]:
        try:
            return tuple(float(tok) for tok in _parse_list(text))
        except ValueError as exc:
            raise ConfigError(f"bad epsilon list {text!r}") from exc

    def parse_int(text: str) -> int:
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"expected an integer, got {text!r}") from exc

    kwargs = {}
    mapping = {
        "arm_count": pick(args.arms, "arms", parse_int),
        "horizon": pick(args.horizon, "horizon", parse_int),
        "epsilons": parse_epsilons(args.epsilon) if args.epsilon is not None else pick(None, "epsilon", parse_epsilons),
        "algorithms": _parse_list(args.algos) if args.algos is not None else pick(None, "algos", _parse_list),
        "replications": pick(args.reps, "reps", parse_int),
        "reward_kind": pick(args.kind, "kind"),
        "mean_spec": pick(args.means, "means"),
        "shuffle_arms": (False if args.no_shuffle else None)
        if args.no_shuffle is not None
        else pick(None, "shuffle", _parse_bool),
        "seed": pick(args.seed, "seed", parse_int),
        "output_dir": pick(args.out, "out", Path),
        "stride": pick(args.stride, "stride", parse_int),
        "plot": pick(args.plot, "plot", _parse_bool),
        "plot_until": pick(args.plot_until, "plot_until", parse_int),
        "workers": pick(args.workers, "workers", parse_int),
    }
    for name, value in mapping.items():
        if value is not None:
            kwargs[name] = value
    try:
        config = ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = assemble_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    result = run_experiment(config)
    try:
        written = emit_outputs(result)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    for curve in result.curves:
        print(
            f"{curve.algorithm:>14s}  eps={curve.epsilon:<5g} "
            f"final regret {curve.mean[-1]:.1f} +/- {curve.stderr[-1]:.1f}"
        )
    print(f"runtime {result.runtime_seconds:.1f}s")
    for label, path in written.items():
        print(f"wrote {label}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
