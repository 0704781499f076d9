"""Figure rendering for experiment results: one panel per erasure probability."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

#: Stable SVG group id for one plotted series, checkable by structure tests.
SERIES_GID = "series-{algorithm}-eps{index}"


def render_regret_figure(result, out_dir: Path, until: int | None = None) -> dict[str, Path]:
    """Render mean regret vs round, one subplot per epsilon, one line per algorithm.

    Each line carries a stable SVG group id (``series-<algorithm>-eps<i>``) and
    a +/- 2 stderr band. Writes ``regret_curves.svg`` and ``regret_curves.png``
    into ``out_dir``; ``until`` truncates the plotted horizon only.
    """
    config = result.config
    epsilons = config.epsilons
    t = np.asarray(result.checkpoints)
    keep = t <= until if until is not None else slice(None)
    fig, axes = plt.subplots(
        1, len(epsilons), figsize=(4.2 * len(epsilons), 3.4), squeeze=False, sharex=True
    )
    for eps_index, epsilon in enumerate(epsilons):
        ax = axes[0][eps_index]
        for algorithm in config.algorithms:
            curve = result.curve(algorithm, epsilon)
            mean = curve.mean[keep]
            band = 2.0 * curve.stderr[keep]
            (line,) = ax.plot(t[keep], mean, label=algorithm)
            line.set_gid(SERIES_GID.format(algorithm=algorithm, index=eps_index))
            ax.fill_between(t[keep], mean - band, mean + band, alpha=0.2, linewidth=0)
        ax.set_title(f"erasure probability {epsilon:g}")
        ax.set_xlabel("round t")
        if eps_index == 0:
            ax.set_ylabel("cumulative regret")
        ax.legend()
    fig.tight_layout()
    written: dict[str, Path] = {}
    for fmt in ("svg", "png"):
        path = out_dir / f"regret_curves.{fmt}"
        fig.savefig(path)
        written[f"figure_{fmt}"] = path
    plt.close(fig)
    return written
