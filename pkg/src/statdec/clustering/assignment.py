"""Soft assignment, frequencies, target distributions and the KL loss."""

import numpy as np
from scipy.special import rel_entr, softmax

from statdec.errors import DegenerateAssignmentError, DegenerateRowError, ParameterError, ShapeError
from statdec.numerics import LOG_FLOOR, Matrix, pairwise_sq_dist, row_normalize, safe_log

# Floor for the per-cluster divisor u_j + v_j.
DENOM_FLOOR = 1e-12


def soft_assign(z: Matrix, centroids: Matrix, alpha: float = 1.0) -> Matrix:
    """Student's t similarity between embeddings and centroids, normalized per row.

    Evaluated in log space so that far-away points never underflow to all-zero rows.
    """
    if centroids.shape[0] == 0:
        raise ParameterError("soft assignment needs at least one centroid")
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    dist = pairwise_sq_dist(z, centroids)
    log_kernel = -(alpha + 1.0) / 2.0 * np.log1p(dist / alpha)
    return softmax(log_kernel, axis=1)


def cluster_frequency(q: Matrix) -> np.ndarray:
    """Soft cluster sizes u_j = sum_i q_ij."""
    return q.sum(axis=0)


def assign_labels(q: Matrix) -> np.ndarray:
    """Hard labels: row-wise argmax, ties to the lowest index."""
    return np.argmax(q, axis=1).astype(np.int64)


def estimate_cardinality(q: Matrix) -> np.ndarray:
    """Hard cluster sizes N_k from the argmax labels."""
    return np.bincount(assign_labels(q), minlength=q.shape[1]).astype(np.int64)


def sample_frequency(q: Matrix, cardinality: np.ndarray, gamma: float = 2.0) -> np.ndarray:
    """Per-cluster weight that grows for small clusters with uncertain members.

    v_j = sum_i sqrt( (sum_k N_k / max(N_j, 1)) * (1 - q_ij)^gamma * (-ln q_ij) )
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    cardinality = np.asarray(cardinality)
    if cardinality.shape != (q.shape[1],):
        raise ShapeError(f"{cardinality.shape[0]} cardinalities for {q.shape[1]} clusters")
    clamped = np.clip(q, LOG_FLOOR, 1.0)
    rarity = cardinality.sum() / np.maximum(cardinality, 1)
    terms = rarity[None, :] * (1.0 - clamped) ** gamma * -safe_log(clamped)
    return np.sqrt(terms).sum(axis=0)


def target_distribution(q: Matrix, u: np.ndarray, v: np.ndarray) -> Matrix:
    """Imbalance-aware target: q_ij^2 / (u_j + v_j), renormalized per row.

    Raises:
        DegenerateAssignmentError: If a row is zero after flooring.
    """
    if u.shape != (q.shape[1],) or v.shape != (q.shape[1],):
        raise ShapeError(f"frequencies {u.shape}/{v.shape} do not fit {q.shape[1]} clusters")
    weighted = q * q / np.maximum(u + v, DENOM_FLOOR)[None, :]
    try:
        return row_normalize(weighted)
    except DegenerateRowError as e:
        raise DegenerateAssignmentError(e.row, f"target row {e.row} is all zero") from e


def dec_target_distribution(q: Matrix, u: np.ndarray) -> Matrix:
    """The unweighted DEC target (q_ij^2 / u_j, renormalized)."""
    return target_distribution(q, u, np.zeros_like(u))


def kl_loss(p: Matrix, q: Matrix) -> float:
    """KL(P || Q) summed over all rows, with 0 ln 0 = 0.

    Non-positive q entries are replaced by LOG_FLOOR; positive ones are used as is
    so that KL(P, P) is exactly zero.
    """
    if p.shape != q.shape:
        raise ShapeError(f"cannot compare {p.shape} with {q.shape}")
    q_safe = np.where(q > 0, q, LOG_FLOOR)
    return float(rel_entr(p, q_safe).sum())
