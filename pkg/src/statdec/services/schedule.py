"""Learning-rate schedule, convergence test and mini-batch sampling."""

import numpy as np

from statdec.errors import ParameterError, ShapeError
from statdec.models.training import TrainConfig
from statdec.numerics import Rng


def lr_at(iteration: int, config: TrainConfig) -> float:
    """Step decay: eta0 divided by `lr_decay_factor` every `lr_decay_every / scale` iterations.

    Args:
        iteration: Zero-based step index within the current phase.
        config: Supplies eta0, the decay factor and period, and the scale divisor.

    Returns:
        The learning rate for that step (non-increasing in `iteration`).

    Raises:
        ParameterError: If iteration is negative.
    """
    if iteration < 0:
        raise ParameterError(f"iteration must be non-negative, got {iteration}")
    # floor(iteration / (lr_decay_every / scale)) in exact integer arithmetic
    decays = iteration * config.scale // config.lr_decay_every
    return config.eta0 / config.lr_decay_factor**decays


def label_change_fraction(prev_labels: np.ndarray, new_labels: np.ndarray) -> float:
    """Fraction of positions whose label differs."""
    prev_labels = np.asarray(prev_labels)
    new_labels = np.asarray(new_labels)
    if prev_labels.shape != new_labels.shape:
        raise ShapeError(
            f"cannot compare {prev_labels.shape[0]} labels with {new_labels.shape[0]}"
        )
    if prev_labels.size == 0:
        return 0.0
    return float(np.count_nonzero(prev_labels != new_labels) / prev_labels.size)


def should_stop(prev_labels: np.ndarray, new_labels: np.ndarray, delta: float) -> bool:
    """True when strictly fewer than a `delta` fraction of labels changed."""
    return label_change_fraction(prev_labels, new_labels) < delta


class BatchSampler:
    """Uniform mini-batches without replacement, reshuffled every epoch.

    The last batch of an epoch may be smaller than `batch_size`.
    """

    def __init__(self, n: int, batch_size: int, rng: Rng):
        if n < 1 or batch_size < 1:
            raise ParameterError(f"need n >= 1 and batch >= 1, got n={n}, batch={batch_size}")
        self.n = n
        self.batch_size = min(batch_size, n)
        self.rng = rng
        self.epoch = 0
        self._order = rng.permutation(n)
        self._cursor = 0

    def next(self) -> np.ndarray:
        if self._cursor >= self.n:
            self._order = self.rng.permutation(self.n)
            self._cursor = 0
            self.epoch += 1
        batch = self._order[self._cursor : self._cursor + self.batch_size]
        self._cursor += self.batch_size
        return batch
