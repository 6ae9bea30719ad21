"""ACC, NMI and ARI for comparing a clustering with ground truth."""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from statdec.errors import ParameterError, ShapeError
from statdec.metrics.hungarian import UNMATCHED, hungarian
from statdec.models.manifests import MetricsReport


@dataclass
class ContingencyTable:
    """Co-occurrence counts, predicted clusters on rows and true classes on columns."""

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int

    @classmethod
    def from_labels(cls, pred: np.ndarray, truth: np.ndarray) -> "ContingencyTable":
        pred, truth = _check_pair(pred, truth)
        counts = np.asarray(contingency_matrix(pred, truth), dtype=np.int64)
        return cls(counts, counts.sum(axis=1), counts.sum(axis=0), int(counts.sum()))


def _check_pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if pred.shape != truth.shape:
        raise ShapeError(f"{pred.shape[0]} predictions for {truth.shape[0]} labels")
    if pred.size == 0:
        raise ParameterError("cannot score an empty labelling")
    return pred, truth


def clustering_accuracy(pred, truth) -> float:
    """Fraction correct under the best one-to-one cluster-to-class map."""
    table = ContingencyTable.from_labels(pred, truth)
    assignment = hungarian(-table.counts)
    matched = np.flatnonzero(assignment != UNMATCHED)
    return float(table.counts[matched, assignment[matched]].sum() / table.n)


def nmi(pred, truth, average_method: Literal["geometric", "arithmetic"] = "geometric") -> float:
    """Mutual information normalized by the geometric (or arithmetic) mean entropy."""
    pred, truth = _check_pair(pred, truth)
    return float(normalized_mutual_info_score(truth, pred, average_method=average_method))


def ari(pred, truth) -> float:
    """Rand index adjusted for chance."""
    pred, truth = _check_pair(pred, truth)
    if pred.size < 2:
        raise ParameterError("ARI needs at least two samples")
    return float(adjusted_rand_score(truth, pred))


def evaluate_clustering(pred, truth, k: int, seed: int) -> MetricsReport:
    """All three scores in one report."""
    pred, truth = _check_pair(pred, truth)
    return MetricsReport(
        acc=clustering_accuracy(pred, truth),
        nmi=nmi(pred, truth),
        ari=ari(pred, truth),
        n=int(pred.size),
        k=k,
        seed=seed,
    )
