"""Analytic gradients of the KL clustering loss at a frozen target P (alpha = 1)."""

import numpy as np

from statdec.errors import ParameterError, ShapeError
from statdec.numerics import Matrix, pairwise_sq_dist


def _weights(
    z: Matrix, centroids: Matrix, p: Matrix, q: Matrix, alpha: float
) -> Matrix:
    if alpha != 1.0:
        raise ParameterError(f"clustering gradients are defined for alpha = 1 only, got {alpha}")
    expected = (z.shape[0], centroids.shape[0])
    if p.shape != expected or q.shape != expected:
        raise ShapeError(f"P {p.shape} and Q {q.shape} must both be {expected}")
    return (p - q) / (1.0 + pairwise_sq_dist(z, centroids))


def grad_embedding(
    z: Matrix, centroids: Matrix, p: Matrix, q: Matrix, alpha: float = 1.0
) -> Matrix:
    """dL_c/dz_i = 2 sum_j (1 + |z_i - m_j|^2)^-1 (p_ij - q_ij)(z_i - m_j)."""
    w = _weights(z, centroids, p, q, alpha)
    return 2.0 * (w.sum(axis=1)[:, None] * z - w @ centroids)


def grad_centroids(
    z: Matrix, centroids: Matrix, p: Matrix, q: Matrix, alpha: float = 1.0
) -> Matrix:
    """dL_c/dm_j = 2 sum_i (1 + |z_i - m_j|^2)^-1 (q_ij - p_ij)(z_i - m_j)."""
    w = -_weights(z, centroids, p, q, alpha)
    return 2.0 * (w.T @ z - w.sum(axis=0)[:, None] * centroids)


def update_centroids(centroids: Matrix, grad: Matrix, eta: float, batch: int) -> Matrix:
    """m_j <- m_j - (eta / batch) * grad_j."""
    if eta <= 0:
        raise ParameterError(f"learning rate must be positive, got {eta}")
    if batch < 1:
        raise ParameterError(f"batch size must be positive, got {batch}")
    if grad.shape != centroids.shape:
        raise ShapeError(f"gradient {grad.shape} does not match centroids {centroids.shape}")
    return centroids - (eta / batch) * grad


def reseed_empty_clusters(
    z: Matrix, centroids: Matrix, q: Matrix, cardinality: np.ndarray
) -> tuple[Matrix, list[int]]:
    """Move every centroid that owns no point onto the least confident embedding.

    Returns:
        The new centroids and the ids that were reseeded.
    """
    empty = [int(k) for k in np.flatnonzero(np.asarray(cardinality) == 0)]
    if not empty:
        return centroids, []
    centroids = centroids.copy()
    confidence = q.max(axis=1).copy()
    for k in empty:
        i = int(np.argmin(confidence))
        centroids[k] = z[i]
        confidence[i] = np.inf
    return centroids, empty
