"""In-memory dataset container."""

from dataclasses import dataclass, replace

import numpy as np

from statdec.errors import ShapeError
from statdec.models.dataset import DatasetMeta
from statdec.numerics import Matrix


@dataclass(frozen=True)
class Dataset:
    """Feature matrix in [0, 1] plus optional labels (evaluation only)."""

    x: Matrix
    labels: np.ndarray | None
    meta: DatasetMeta

    def __post_init__(self) -> None:
        if self.x.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {self.x.shape}")
        if self.labels is not None and self.labels.shape != (self.x.shape[0],):
            raise ShapeError(f"{self.labels.shape[0]} labels for {self.x.shape[0]} samples")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def num_classes(self) -> int:
        return 0 if self.labels is None or self.labels.size == 0 else int(self.labels.max()) + 1

    def class_counts(self) -> list[int] | None:
        if self.labels is None:
            return None
        return np.bincount(self.labels, minlength=self.num_classes).tolist()

    def subset(self, indices: np.ndarray, meta: DatasetMeta | None = None) -> "Dataset":
        """Rows at `indices`, in that order."""
        labels = None if self.labels is None else self.labels[indices]
        return replace(self, x=self.x[indices], labels=labels, meta=meta or self.meta)
