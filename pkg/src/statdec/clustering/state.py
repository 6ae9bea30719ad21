"""Snapshot of every clustering quantity for one set of embeddings."""

from dataclasses import dataclass

import numpy as np

from statdec.clustering.assignment import (
    cluster_frequency,
    dec_target_distribution,
    estimate_cardinality,
    sample_frequency,
    soft_assign,
    target_distribution,
)
from statdec.numerics import Matrix


@dataclass
class ClusterState:
    centroids: Matrix
    q: Matrix
    p: Matrix
    u: np.ndarray
    v: np.ndarray
    cardinality: np.ndarray
    alpha: float = 1.0
    gamma: float = 2.0

    @classmethod
    def compute(
        cls,
        z: Matrix,
        centroids: Matrix,
        alpha: float = 1.0,
        gamma: float = 2.0,
        weighted: bool = True,
    ) -> "ClusterState":
        """Evaluate Q, the frequencies and P for embeddings z.

        With weighted=False, v is zero and P is the DEC target.
        """
        q = soft_assign(z, centroids, alpha)
        u = cluster_frequency(q)
        cardinality = estimate_cardinality(q)
        if weighted:
            v = sample_frequency(q, cardinality, gamma)
            p = target_distribution(q, u, v)
        else:
            v = np.zeros_like(u)
            p = dec_target_distribution(q, u)
        return cls(centroids, q, p, u, v, cardinality, alpha, gamma)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.q, axis=1).astype(np.int64)
