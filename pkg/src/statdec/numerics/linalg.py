"""Dense float64 kernels shared by the network and clustering code."""

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import cdist

from statdec.errors import DegenerateRowError, NonFiniteError, ShapeError

Matrix = NDArray[np.float64]

# Floor applied before every log of a probability.
LOG_FLOOR = 1e-12


def as_matrix(values: object) -> Matrix:
    """Coerce an array-like into a 2-D float64 matrix."""
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {array.shape}")
    return array


def ensure_finite(a: Matrix, what: str = "result") -> Matrix:
    """Raise if any entry of `a` is NaN or infinite."""
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{what} contains non-finite entries")
    return a


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product with an explicit shape check.

    Raises:
        ShapeError: If a.cols != b.rows.
    """
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return ensure_finite(a @ b, "matmul")


def pairwise_sq_dist(z: Matrix, m: Matrix) -> Matrix:
    """Squared Euclidean distance between every row of z and every row of m."""
    if z.ndim != 2 or m.ndim != 2 or z.shape[1] != m.shape[1]:
        raise ShapeError(f"cannot compare rows of {z.shape} with rows of {m.shape}")
    return cdist(z, m, metric="sqeuclidean")


def row_normalize(a: Matrix) -> Matrix:
    """Scale each row to sum to one.

    Raises:
        DegenerateRowError: If some row sums to zero or less.
    """
    sums = a.sum(axis=1)
    bad = np.flatnonzero(~(sums > 0))
    if bad.size:
        raise DegenerateRowError(int(bad[0]))
    return a / sums[:, None]


def safe_log(a: Matrix) -> Matrix:
    """Natural log with entries floored at LOG_FLOOR."""
    return np.log(np.maximum(a, LOG_FLOOR))
