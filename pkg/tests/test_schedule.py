"""Tests for the learning-rate schedule, stop rule and batch sampler."""

import numpy as np
import pytest

from statdec.errors import ParameterError, ShapeError
from statdec.models.training import TrainConfig
from statdec.numerics import make_rng
from statdec.services import BatchSampler, label_change_fraction, lr_at, should_stop


class TestLrAt:
    """Tests for step decay."""

    @pytest.mark.parametrize(
        ("iteration", "expected"), [(0, 0.01), (19999, 0.01), (20000, 0.001), (45000, 0.0001)]
    )
    def test_published_schedule(self, iteration: int, expected: float) -> None:
        """Test division by 10 every 20000 iterations."""
        assert lr_at(iteration, TrainConfig()) == pytest.approx(expected)

    def test_scaled_period(self) -> None:
        """Test scale shortens the decay period."""
        assert lr_at(200, TrainConfig(scale=100)) == pytest.approx(0.001)

    @pytest.mark.parametrize(("iteration", "expected"), [(6666, 0.01), (6667, 0.001), (13334, 0.0001)])
    def test_scale_not_dividing_period(self, iteration: int, expected: float) -> None:
        """Test the decay boundary uses real division when scale does not divide the period."""
        assert lr_at(iteration, TrainConfig(scale=3)) == pytest.approx(expected)

    def test_non_increasing(self) -> None:
        """Test the schedule never increases."""
        config = TrainConfig(scale=1000)
        rates = [lr_at(it, config) for it in range(200)]
        assert all(a >= b for a, b in zip(rates, rates[1:], strict=False))

    def test_negative_iteration(self) -> None:
        """Test negative iterations raise ParameterError."""
        with pytest.raises(ParameterError):
            lr_at(-1, TrainConfig())


class TestShouldStop:
    """Tests for the label-change stop rule."""

    def test_identical(self) -> None:
        """Test unchanged labels stop."""
        assert should_stop(np.arange(10), np.arange(10), 0.001)

    def test_one_change_in_hundred(self) -> None:
        """Test a 1% change does not stop at delta 0.001."""
        prev = np.zeros(100, dtype=int)
        new = prev.copy()
        new[0] = 1
        assert label_change_fraction(prev, new) == 0.01
        assert not should_stop(prev, new, 0.001)

    def test_length_mismatch(self) -> None:
        """Test different lengths raise ShapeError."""
        with pytest.raises(ShapeError):
            should_stop(np.zeros(3), np.zeros(4), 0.1)


class TestBatchSampler:
    """Tests for epoch-wise sampling."""

    def test_epoch_covers_every_index(self) -> None:
        """Test one epoch visits each row exactly once."""
        sampler = BatchSampler(10, 4, make_rng(0))
        seen = np.concatenate([sampler.next() for _ in range(3)])
        assert sorted(seen.tolist()) == list(range(10))
        assert sampler.epoch == 0
        sampler.next()
        assert sampler.epoch == 1

    def test_batch_capped_at_n(self) -> None:
        """Test a batch larger than the data is the whole data."""
        assert BatchSampler(5, 256, make_rng(0)).next().size == 5

    def test_deterministic(self) -> None:
        """Test equal seeds give equal batches."""
        a = BatchSampler(20, 3, make_rng(1))
        b = BatchSampler(20, 3, make_rng(1))
        for _ in range(15):
            np.testing.assert_array_equal(a.next(), b.next())

    def test_rejects_empty(self) -> None:
        """Test zero rows raise ParameterError."""
        with pytest.raises(ParameterError):
            BatchSampler(0, 4, make_rng(0))
