"""Seeded random streams and weight initialization."""

import numpy as np

from statdec.errors import ParameterError
from statdec.numerics.linalg import Matrix

Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    """Create a PCG64 generator; equal seeds replay equal streams."""
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(rng: Rng) -> int:
    """Draw a 31-bit seed for libraries that take an integer random_state."""
    return int(rng.integers(0, 2**31 - 1))


def glorot_init(rng: Rng, fan_in: int, fan_out: int) -> Matrix:
    """Glorot/Xavier uniform weights of shape (fan_in, fan_out)."""
    if fan_in < 1 or fan_out < 1:
        raise ParameterError(f"layer dimensions must be positive, got {fan_in}x{fan_out}")
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))
