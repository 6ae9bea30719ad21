"""SVG line charts of the training curves, rendered with matplotlib."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from statdec.models.training import EvaluationPoint, HistoryRecord  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt so element ids, and therefore the files, are reproducible.
SVG_HASH_SALT = "statdec"


def _save_svg(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Chart written: {path}")
    return path


def plot_loss_curves(records: list[HistoryRecord], path: Path) -> Path:
    """L, Lc and Lr against iteration."""
    iterations = [r.iteration for r in records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(iterations, [r.loss for r in records], label="L")
    ax.plot(iterations, [r.clustering_loss for r in records], label="Lc")
    ax.plot(iterations, [r.reconstruction_loss for r in records], label="Lr")
    ax.set_xlabel("iteration")
    ax.set_ylabel("loss")
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_metric_curves(evaluations: list[EvaluationPoint], path: Path) -> Path:
    """ACC, NMI and ARI at each P-update."""
    iterations = [e.iteration for e in evaluations]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in ("acc", "nmi", "ari"):
        ax.plot(iterations, [getattr(e, name) for e in evaluations], marker="o", label=name.upper())
    ax.set_xlabel("iteration")
    ax.set_ylabel("score")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, path)
