"""Dense linear algebra, seeded randomness and elementwise kernels."""

from statdec.numerics.linalg import (
    LOG_FLOOR,
    Matrix,
    as_matrix,
    ensure_finite,
    matmul,
    pairwise_sq_dist,
    row_normalize,
    safe_log,
)
from statdec.numerics.rng import Rng, derive_seed, glorot_init, make_rng

__all__ = [
    "LOG_FLOOR",
    "Matrix",
    "Rng",
    "as_matrix",
    "derive_seed",
    "ensure_finite",
    "glorot_init",
    "make_rng",
    "matmul",
    "pairwise_sq_dist",
    "row_normalize",
    "safe_log",
]
