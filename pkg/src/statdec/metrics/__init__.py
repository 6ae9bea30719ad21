"""Unsupervised clustering evaluation."""

from statdec.metrics.hungarian import UNMATCHED, assignment_cost, hungarian
from statdec.metrics.scores import (
    ContingencyTable,
    ari,
    clustering_accuracy,
    evaluate_clustering,
    nmi,
)

__all__ = [
    "UNMATCHED",
    "ContingencyTable",
    "ari",
    "assignment_cost",
    "clustering_accuracy",
    "evaluate_clustering",
    "hungarian",
    "nmi",
]
