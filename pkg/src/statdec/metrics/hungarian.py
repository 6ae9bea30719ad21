"""Minimum-cost assignment on a zero-padded square cost matrix."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from statdec.errors import ParameterError, ShapeError

# Marks a row matched to a padding column.
UNMATCHED = -1


def hungarian(cost: np.ndarray) -> np.ndarray:
    """Optimal row -> column assignment.

    The matrix is padded with zero-cost rows/columns to a square before solving.

    Returns:
        assignment[i] = column matched to row i, or UNMATCHED for padding.

    Raises:
        ParameterError: If any entry is NaN or infinite.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ShapeError(f"cost matrix must be 2-D, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ParameterError("cost matrix has non-finite entries")
    rows, cols = cost.shape
    size = max(rows, cols)
    padded = np.zeros((size, size))
    padded[:rows, :cols] = cost
    row_ind, col_ind = linear_sum_assignment(padded)

    assignment = np.full(rows, UNMATCHED, dtype=np.int64)
    for r, c in zip(row_ind, col_ind, strict=True):
        if r < rows and c < cols:
            assignment[r] = c
    return assignment


def assignment_cost(cost: np.ndarray, assignment: np.ndarray) -> float:
    """Total cost of the matched (non-padding) pairs."""
    rows = np.flatnonzero(assignment != UNMATCHED)
    return float(np.asarray(cost)[rows, assignment[rows]].sum())
