"""Shared test utilities."""

import csv
from collections.abc import Callable
from pathlib import Path

import numpy as np

from statdec.data import Dataset
from statdec.models.dataset import DatasetMeta
from statdec.models.training import HistoryRecord


def central_difference(f: Callable[[], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Numerical gradient of f() with respect to the array x, perturbed in place."""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        original = x[idx]
        x[idx] = original + h
        upper = f()
        x[idx] = original - h
        lower = f()
        x[idx] = original
        grad[idx] = (upper - lower) / (2 * h)
    return grad


def make_blobs(
    sizes: list[int],
    centers: list[tuple[float, float]],
    sigma: float,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic 2-D Gaussian blobs, shuffled."""
    rng = np.random.default_rng(seed)
    x = np.vstack(
        [rng.normal(center, sigma, size=(size, 2)) for size, center in zip(sizes, centers, strict=True)]
    )
    y = np.concatenate([np.full(size, c, dtype=np.int64) for c, size in enumerate(sizes)])
    order = rng.permutation(len(y))
    return x[order], y[order]


BLOB_SIZES = [600, 120, 30]
BLOB_CENTERS = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]


def blob_dataset(seed: int = 0) -> Dataset:
    x, y = make_blobs(BLOB_SIZES, BLOB_CENTERS, 0.2, seed)
    return Dataset(x=x, labels=y, meta=DatasetMeta(source="blobs", class_counts=BLOB_SIZES))


def balanced_dataset(num_classes: int, per_class: int) -> Dataset:
    """One feature column equal to the class id scaled to [0, 1]."""
    y = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    x = (y / max(num_classes - 1, 1)).astype(np.float64)[:, None]
    return Dataset(x=x, labels=y, meta=DatasetMeta(source="synthetic"))


def read_history_csv(path: Path) -> list[HistoryRecord]:
    """Parse a history.csv back into records."""
    with open(path, encoding="utf-8", newline="") as f:
        return [
            HistoryRecord(
                iteration=int(row["iter"]),
                loss=float(row["L"]),
                clustering_loss=float(row["Lc"]),
                reconstruction_loss=float(row["Lr"]),
                eta=float(row["eta"]),
                label_change=float(row["label_change"]) if row["label_change"] else None,
            )
            for row in csv.DictReader(f)
        ]


def read_labels(path: Path) -> np.ndarray:
    return np.asarray([int(line) for line in Path(path).read_text().split()], dtype=np.int64)
