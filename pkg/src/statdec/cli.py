"""Command-line entry point: pretrain, train, eval and make-imbalanced."""

import argparse
import logging
import sys
import time
from collections.abc import Callable
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from pydantic import ValidationError
from threadpoolctl import threadpool_limits

from statdec.clustering import assign_labels, soft_assign
from statdec.data import (
    Dataset,
    get_settings,
    load_csv,
    load_idx,
    load_train_config,
    make_imbalanced,
    save_csv,
    save_idx,
)
from statdec.errors import DivergenceError, ParameterError, StatDECError
from statdec.metrics import evaluate_clustering
from statdec.models.dataset import ImbalanceKind, ImbalanceSpec
from statdec.models.manifests import ImbalanceManifest, MetricsReport, RunManifest
from statdec.models.training import TrainConfig
from statdec.network import Checkpoint, decode, embed, load_checkpoint, save_checkpoint
from statdec.network.mlp import reconstruction_loss
from statdec.numerics import make_rng
from statdec.services import pretrain, train
from statdec.services.artifacts import (
    CHECKPOINT_FILE,
    EMBEDDINGS_FILE,
    HISTORY_FILE,
    LABELS_FILE,
    MANIFEST_FILE,
    METRICS_FILE,
    digest_artifacts,
    write_embeddings_csv,
    write_history_csv,
    write_json_model,
    write_labels,
)
from statdec.services.charts import plot_loss_curves, plot_metric_curves

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3


def _hidden_dims(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated widths, got {value!r}") from e


def load_dataset(
    path: Path,
    labels_path: Path | None = None,
    label_column: str | None = None,
    scale: bool = True,
) -> Dataset:
    """Load a `.csv` file with `load_csv`, anything else as IDX."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return load_csv(path, label_column=label_column, scale=scale)
    return load_idx(path, labels_path)


def _write_manifest(
    out: Path,
    command: str,
    seed: int,
    dataset: Dataset | None,
    artifacts: list[Path],
    timings: dict[str, float],
    config: TrainConfig | None = None,
    metrics: MetricsReport | None = None,
) -> Path:
    manifest = RunManifest(
        command=command,
        variant=config.variant.value if config is not None else None,
        config=config.model_dump(mode="json", by_alias=True) if config is not None else {},
        seed=seed,
        dataset=dataset.meta if dataset is not None else None,
        artifacts=digest_artifacts(artifacts),
        timings={phase: round(seconds, 3) for phase, seconds in timings.items()},
        metrics=metrics,
        created_at=datetime.now(UTC),
    )
    return write_json_model(manifest, out / MANIFEST_FILE)


def _config_from_args(args: argparse.Namespace) -> TrainConfig:
    ablation: dict[str, bool] = {}
    if getattr(args, "no_weighted_target", False):
        ablation["weighted_target"] = False
    if getattr(args, "no_stat_pooling", False):
        ablation["stat_pooling"] = False
    overrides: dict[str, Any] = {
        "k": getattr(args, "k", None),
        "lambda": getattr(args, "lambda_", None),
        "gamma": getattr(args, "gamma", None),
        "delta": getattr(args, "delta", None),
        "batch": args.batch,
        "update_interval": getattr(args, "update_interval", None),
        "scale": args.scale,
        "max_iters": getattr(args, "max_iters", None),
        "hidden_dims": args.hidden_dims,
        "ablation": ablation or None,
    }
    return load_train_config(args.config, args.preset, overrides)


def cmd_pretrain(args: argparse.Namespace) -> int:
    """Pretrain the autoencoder and write its checkpoint."""
    timings: dict[str, float] = {}
    ds = load_dataset(args.data, args.labels, args.label_column, not args.no_scale)
    config = _config_from_args(args)

    start = time.perf_counter()
    autoencoder = pretrain(config, ds.x, make_rng(args.seed))
    timings["pretrain"] = time.perf_counter() - start

    z = embed(autoencoder.encoder, ds.x)
    x_rec, _ = decode(autoencoder.decoder, z)
    final_lr = reconstruction_loss(ds.x, x_rec)

    out = Path(args.out)
    iterations = config.scaled(config.pretrain_iters) * autoencoder.encoder.depth + config.scaled(
        config.finetune_iters
    )
    checkpoint_path = out / CHECKPOINT_FILE
    save_checkpoint(checkpoint_path, Checkpoint(autoencoder), args.seed, iterations)
    _write_manifest(out, "pretrain", args.seed, ds, [checkpoint_path], timings, config)
    print(f"Lr={final_lr:.6f}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    """Run the joint clustering loop and write every artifact."""
    if args.checkpoint is None and args.pretrain != "inline":
        raise ParameterError("pass --checkpoint PATH or --pretrain inline")

    timings: dict[str, float] = {}
    ds = load_dataset(args.data, args.labels, args.label_column, not args.no_scale)
    config = _config_from_args(args)

    autoencoder = None
    if args.checkpoint is not None:
        checkpoint, _ = load_checkpoint(args.checkpoint)
        autoencoder = checkpoint.autoencoder
        width = autoencoder.encoder.topology[0]
        if width != ds.dim:
            raise ParameterError(
                f"checkpoint expects input width {width}, dataset has width {ds.dim}"
            )

    start = time.perf_counter()
    result = train(config, ds.x, make_rng(args.seed), autoencoder=autoencoder, truth=ds.labels)
    timings["train"] = time.perf_counter() - start

    out = Path(args.out)
    history = result.history
    checkpoint_path = out / CHECKPOINT_FILE
    save_checkpoint(
        checkpoint_path,
        Checkpoint(result.autoencoder, result.cluster_state.centroids, result.pool),
        args.seed,
        history.stop_iteration,
    )
    artifacts = [
        checkpoint_path,
        write_labels(history.labels, out / LABELS_FILE),
        write_embeddings_csv(history.embeddings, out / EMBEDDINGS_FILE),
        write_history_csv(history.records, out / HISTORY_FILE),
    ]
    if args.svg:
        artifacts.append(plot_loss_curves(history.records, out / "loss.svg"))
        if history.evaluations:
            artifacts.append(plot_metric_curves(history.evaluations, out / "metrics.svg"))

    report = None
    if ds.labels is not None:
        report = evaluate_clustering(history.labels, ds.labels, config.k, args.seed)
        artifacts.append(write_json_model(report, out / METRICS_FILE))
        print(f"ACC={report.acc:.4f} NMI={report.nmi:.4f} ARI={report.ari:.4f}")

    _write_manifest(out, "train", args.seed, ds, artifacts, timings, config, report)
    logger.info(f"Run written to {out} ({result.variant.value})")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Score a trained checkpoint on a labeled dataset."""
    checkpoint, manifest = load_checkpoint(args.checkpoint)
    if checkpoint.centroids is None:
        raise ParameterError(f"{args.checkpoint} holds no centroids; run `train` first")
    ds = load_dataset(args.data, args.labels, args.label_column, not args.no_scale)
    if ds.labels is None:
        raise ParameterError("evaluation needs ground-truth labels (--labels or --label-column)")
    width = checkpoint.autoencoder.encoder.topology[0]
    if width != ds.dim:
        raise ParameterError(f"checkpoint expects input width {width}, dataset has width {ds.dim}")

    start = time.perf_counter()
    z = embed(checkpoint.autoencoder.encoder, ds.x)
    pred = assign_labels(soft_assign(z, checkpoint.centroids))
    seed = manifest.seed if manifest is not None else args.seed
    report = evaluate_clustering(pred, ds.labels, checkpoint.centroids.shape[0], seed)
    timings = {"eval": time.perf_counter() - start}

    out = Path(args.out)
    metrics_path = write_json_model(report, out / METRICS_FILE)
    _write_manifest(out, "eval", seed, ds, [metrics_path], timings, metrics=report)
    print(report.model_dump_json())
    return EXIT_OK


def cmd_make_imbalanced(args: argparse.Namespace) -> int:
    """Subsample a balanced labeled dataset and write it in its input format."""
    spec = ImbalanceSpec(kind=args.kind, ratio=args.ratio)
    # Unscaled so the written rows are a subset of the input rows.
    ds = load_dataset(args.data, args.labels, args.label_column, scale=False)

    start = time.perf_counter()
    subset = make_imbalanced(ds, spec, make_rng(args.seed), invert=args.invert_step, seed=args.seed)
    timings = {"subsample": time.perf_counter() - start}

    out = Path(args.out)
    if Path(args.data).suffix.lower() == ".csv":
        data_paths = [out / "data.csv"]
        save_csv(subset, data_paths[0], label_column=args.label_column or "y")
    else:
        data_paths = [out / "images.idx", out / "labels.idx"]
        save_idx(subset, *data_paths)

    counts = subset.class_counts() or []
    imbalance = ImbalanceManifest(
        kind=spec.kind,
        ratio=spec.ratio,
        seed=args.seed,
        source=str(args.data),
        kept_counts=counts,
        invert_step=args.invert_step,
    )
    imbalance_path = write_json_model(imbalance, out / "imbalance.json")
    _write_manifest(
        out, "make-imbalanced", args.seed, subset, [*data_paths, imbalance_path], timings
    )
    print(f"kept {sum(counts)} samples: {counts}")
    return EXIT_OK


def _add_data_arguments(parser: argparse.ArgumentParser, labels_required: bool = False) -> None:
    parser.add_argument("--data", type=Path, required=True, help="IDX image file or CSV file")
    parser.add_argument(
        "--labels",
        type=Path,
        default=None,
        help="IDX label file (labels are used for evaluation only)"
        + (" (required for IDX data)" if labels_required else ""),
    )
    parser.add_argument(
        "--label-column", default=None, help="CSV column (name or index) holding labels"
    )
    parser.add_argument(
        "--no-scale", action="store_true", help="Do not min-max scale CSV features"
    )


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="JSON file of TrainConfig fields")
    parser.add_argument(
        "--preset",
        choices=["mnist", "cifar10", "cifar100", "refuge"],
        default=None,
        help="Dataset batch size / update interval preset",
    )
    parser.add_argument("--batch", type=int, default=None, help="Mini-batch size")
    parser.add_argument(
        "--scale", type=int, default=None, help="Divide all iteration counts by N"
    )
    parser.add_argument(
        "--hidden-dims",
        type=_hidden_dims,
        default=None,
        help="Comma-separated encoder hidden widths (default: 500,500,1000)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statdec",
        description="Statistical deep embedded clustering for imbalanced data",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    pretrain_parser = subparsers.add_parser("pretrain", help="Pretrain the autoencoder")
    _add_data_arguments(pretrain_parser)
    _add_run_arguments(pretrain_parser)
    _add_config_arguments(pretrain_parser)
    pretrain_parser.set_defaults(handler=cmd_pretrain)

    train_parser = subparsers.add_parser("train", help="Run the joint clustering loop")
    _add_data_arguments(train_parser)
    _add_run_arguments(train_parser)
    _add_config_arguments(train_parser)
    train_parser.add_argument("--checkpoint", type=Path, default=None, help="Pretrained model")
    train_parser.add_argument(
        "--pretrain", choices=["inline"], default=None, help="Pretrain before training"
    )
    train_parser.add_argument("--k", type=int, default=None, help="Number of clusters")
    train_parser.add_argument(
        "--lambda", dest="lambda_", type=float, default=None, help="Clustering loss weight"
    )
    train_parser.add_argument("--gamma", type=float, default=None, help="Focusing exponent")
    train_parser.add_argument("--delta", type=float, default=None, help="Label-change threshold")
    train_parser.add_argument(
        "--update-interval", type=int, default=None, help="Iterations between target updates"
    )
    train_parser.add_argument("--max-iters", type=int, default=None, help="Clustering iterations")
    train_parser.add_argument(
        "--no-weighted-target", action="store_true", help="Use the unweighted DEC target"
    )
    train_parser.add_argument(
        "--no-stat-pooling", action="store_true", help="Disable statistics pooling"
    )
    train_parser.add_argument("--svg", action="store_true", help="Write SVG loss/metric charts")
    train_parser.set_defaults(handler=cmd_train)

    eval_parser = subparsers.add_parser("eval", help="Score a trained model on labeled data")
    eval_parser.add_argument("--checkpoint", type=Path, required=True, help="Trained model")
    _add_data_arguments(eval_parser, labels_required=True)
    _add_run_arguments(eval_parser)
    eval_parser.set_defaults(handler=cmd_eval)

    imbalance_parser = subparsers.add_parser(
        "make-imbalanced", help="Subsample a balanced dataset"
    )
    _add_data_arguments(imbalance_parser, labels_required=True)
    _add_run_arguments(imbalance_parser)
    imbalance_parser.add_argument(
        "--kind", choices=[kind.value for kind in ImbalanceKind], required=True
    )
    imbalance_parser.add_argument("--ratio", type=float, required=True, help="rho >= 1")
    imbalance_parser.add_argument(
        "--invert-step", action="store_true", help="Put the minority classes first"
    )
    imbalance_parser.set_defaults(handler=cmd_make_imbalanced)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    if args.out is None:
        args.out = settings.output_dir

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        with threadpool_limits(limits=settings.threads):
            return handler(args)
    except DivergenceError as e:
        print(f"error: training diverged: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (OSError, StatDECError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
