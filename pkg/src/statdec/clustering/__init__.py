"""Clustering mathematics: K-means init, soft/target distributions, KL gradients."""

from statdec.clustering.assignment import (
    assign_labels,
    cluster_frequency,
    dec_target_distribution,
    estimate_cardinality,
    kl_loss,
    sample_frequency,
    soft_assign,
    target_distribution,
)
from statdec.clustering.gradients import (
    grad_centroids,
    grad_embedding,
    reseed_empty_clusters,
    update_centroids,
)
from statdec.clustering.kmeans import kmeans_init
from statdec.clustering.state import ClusterState

__all__ = [
    "ClusterState",
    "assign_labels",
    "cluster_frequency",
    "dec_target_distribution",
    "estimate_cardinality",
    "grad_centroids",
    "grad_embedding",
    "kl_loss",
    "kmeans_init",
    "reseed_empty_clusters",
    "sample_frequency",
    "soft_assign",
    "target_distribution",
    "update_centroids",
]
