"""Writers for run outputs: history, embeddings, labels, metrics and manifests."""

import csv
import hashlib
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from statdec.models.training import HistoryRecord
from statdec.numerics import Matrix

logger = logging.getLogger(__name__)

HISTORY_HEADER = ["iter", "L", "Lc", "Lr", "eta", "label_change"]

HISTORY_FILE = "history.csv"
EMBEDDINGS_FILE = "embeddings.csv"
LABELS_FILE = "labels.txt"
METRICS_FILE = "metrics.json"
MANIFEST_FILE = "manifest.json"
CHECKPOINT_FILE = "model.bin"


def _fmt(value: float) -> str:
    return repr(float(value))


def write_history_csv(records: list[HistoryRecord], path: Path) -> Path:
    """One row per optimization step; label_change is blank between P-updates."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HISTORY_HEADER)
        for record in records:
            writer.writerow(
                [
                    record.iteration,
                    _fmt(record.loss),
                    _fmt(record.clustering_loss),
                    _fmt(record.reconstruction_loss),
                    _fmt(record.eta),
                    "" if record.label_change is None else _fmt(record.label_change),
                ]
            )
    return path


def write_embeddings_csv(z: Matrix, path: Path) -> Path:
    """n rows of embedding coordinates, no header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerows([_fmt(value) for value in row] for row in np.asarray(z))
    return path


def write_labels(labels: np.ndarray, path: Path) -> Path:
    """One integer cluster id per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{int(label)}\n" for label in labels), encoding="utf-8")
    return path


def write_json_model(model: BaseModel, path: Path) -> Path:
    """Pretty-printed JSON dump of a pydantic model."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def digest_artifacts(paths: list[Path]) -> dict[str, str]:
    """Map each existing file's name to its SHA-256 digest."""
    digests = {Path(p).name: file_sha256(p) for p in paths if Path(p).exists()}
    logger.debug(f"Artifact digests: {digests}")
    return digests
