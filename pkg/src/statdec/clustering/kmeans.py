"""K-means initialization of the centroids on the latent embeddings."""

import logging

import numpy as np
from sklearn.cluster import KMeans

from statdec.errors import DegenerateDataError, ParameterError
from statdec.numerics import Matrix, Rng, derive_seed

logger = logging.getLogger(__name__)


def kmeans_init(z: Matrix, k: int, rng: Rng, restarts: int = 20) -> tuple[Matrix, np.ndarray]:
    """Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by inertia.

    Returns:
        (centroids of shape (k, d), label per row of z)

    Raises:
        ParameterError: If k < 1, restarts < 1 or k exceeds the number of rows.
        DegenerateDataError: If z has fewer than k distinct rows.
    """
    n = z.shape[0]
    if k < 1 or restarts < 1:
        raise ParameterError(f"k and restarts must be positive, got k={k}, restarts={restarts}")
    if k > n:
        raise ParameterError(f"cannot form {k} clusters from {n} points")
    if k > 1 and np.unique(z, axis=0).shape[0] < k:
        raise DegenerateDataError(f"fewer than {k} distinct points to seed {k} clusters")

    model = KMeans(n_clusters=k, init="k-means++", n_init=restarts, random_state=derive_seed(rng))
    labels = model.fit_predict(z).astype(np.int64)
    centroids = np.asarray(model.cluster_centers_, dtype=np.float64)

    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        raise DegenerateDataError(f"k-means left clusters {np.flatnonzero(sizes == 0).tolist()} empty")
    logger.info(f"K-means init: k={k}, inertia={model.inertia_:.6g}, sizes={sizes.tolist()}")
    return centroids, labels
