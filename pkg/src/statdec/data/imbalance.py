"""Step and long-tailed subsampling of a balanced labeled dataset."""

import logging
import math

import numpy as np

from statdec.data.dataset import Dataset
from statdec.errors import ParameterError
from statdec.models.dataset import DatasetMeta, ImbalanceKind, ImbalanceSpec
from statdec.numerics import Rng

logger = logging.getLogger(__name__)


def _class_indices(ds: Dataset) -> list[np.ndarray]:
    if ds.labels is None:
        raise ParameterError("imbalance generators need labels")
    indices = [np.flatnonzero(ds.labels == c) for c in range(ds.num_classes)]
    sizes = {idx.size for idx in indices}
    if len(sizes) > 1:
        logger.warning(
            f"Input classes are not balanced (sizes {sorted(sizes)}); using the smallest"
        )
    return indices


def step_counts(num_classes: int, per_class: int, ratio: float, invert: bool = False) -> list[int]:
    """First ceil(C/2) classes keep `per_class`, the rest floor(per_class / ratio).

    With invert=True the minority classes come first instead.
    """
    minority = math.floor(per_class / ratio)
    majority_count = math.ceil(num_classes / 2)
    counts = [per_class] * majority_count + [minority] * (num_classes - majority_count)
    return counts[::-1] if invert else counts


def longtail_counts(num_classes: int, per_class: int, ratio: float) -> list[int]:
    """Class c keeps floor(per_class * ratio^(-c / (C - 1))), so head/tail is rho."""
    if num_classes == 1:
        return [per_class]
    return [
        math.floor(per_class * ratio ** (-c / (num_classes - 1))) for c in range(num_classes)
    ]


def _subsample(
    ds: Dataset,
    indices: list[np.ndarray],
    counts: list[int],
    spec: ImbalanceSpec,
    rng: Rng,
    seed: int | None,
) -> Dataset:
    if min(counts) == 0:
        raise ParameterError(
            f"ratio {spec.ratio:g} leaves a class with no samples (counts {counts})"
        )
    kept = [
        np.sort(rng.choice(idx, size=count, replace=False))
        for idx, count in zip(indices, counts, strict=True)
    ]
    order = rng.permutation(np.concatenate(kept))
    meta = DatasetMeta(
        source=ds.meta.source, class_counts=list(counts), imbalance=spec, seed=seed
    )
    logger.info(f"{spec.kind.value} imbalance rho={spec.ratio:g}: kept {counts}")
    return ds.subset(order, meta)


def make_step_imbalance(
    ds: Dataset, spec: ImbalanceSpec, rng: Rng, invert: bool = False, seed: int | None = None
) -> Dataset:
    """Keep all samples of the majority half and 1/rho of the minority half.

    Raises:
        ParameterError: If labels are missing or a minority class would be empty.
    """
    if spec.kind != ImbalanceKind.STEP:
        raise ParameterError(f"expected a step spec, got {spec.kind.value}")
    indices = _class_indices(ds)
    per_class = min(idx.size for idx in indices)
    counts = step_counts(len(indices), per_class, spec.ratio, invert)
    return _subsample(ds, indices, counts, spec, rng, seed)


def make_longtail_imbalance(
    ds: Dataset, spec: ImbalanceSpec, rng: Rng, seed: int | None = None
) -> Dataset:
    """Exponentially decaying class sizes from n_c down to n_c / rho.

    Raises:
        ParameterError: If labels are missing or a tail class would be empty.
    """
    if spec.kind != ImbalanceKind.LONGTAIL:
        raise ParameterError(f"expected a longtail spec, got {spec.kind.value}")
    indices = _class_indices(ds)
    per_class = min(idx.size for idx in indices)
    counts = longtail_counts(len(indices), per_class, spec.ratio)
    return _subsample(ds, indices, counts, spec, rng, seed)


def make_imbalanced(
    ds: Dataset, spec: ImbalanceSpec, rng: Rng, invert: bool = False, seed: int | None = None
) -> Dataset:
    if spec.kind == ImbalanceKind.STEP:
        return make_step_imbalance(ds, spec, rng, invert=invert, seed=seed)
    return make_longtail_imbalance(ds, spec, rng, seed=seed)
