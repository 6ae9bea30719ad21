"""Tests for statistics pooling."""

import numpy as np
import pytest

from statdec.errors import ParameterError, ShapeError, TraceMismatchError
from statdec.network import StatPoolLayer, pass_through_projection, pool_backward, pool_forward
from tests.helpers import central_difference


def _random_projection(width: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    return rng.normal(size=(3 * width + 1, width)), rng.normal(size=width)


class TestPoolForward:
    """Tests for the pooled forward pass."""

    def test_identical_rows(self) -> None:
        """Test identical rows in one cluster have zero spread and mean equal to the row."""
        h = np.tile([1.5, -2.0], (4, 1))
        proj, bias = pass_through_projection(2)
        out = pool_forward(h, np.zeros(4, dtype=np.int64), proj, bias, num_clusters=1)
        np.testing.assert_allclose(out.means[0], [1.5, -2.0])
        np.testing.assert_array_equal(out.spreads[0], [0.0, 0.0])

    def test_population_std(self) -> None:
        """Test {0, 2} has mean 1 and population std 1."""
        proj, bias = pass_through_projection(1)
        out = pool_forward(np.array([[0.0], [2.0]]), np.array([0, 0]), proj, bias, 1)
        stats = out.stats[0]
        assert stats.cardinality == 2
        np.testing.assert_allclose(stats.mu, [1.0])
        np.testing.assert_allclose(stats.sigma, [1.0])

    def test_variance_mode(self) -> None:
        """Test the variance switch pools sigma squared."""
        proj, bias = pass_through_projection(1)
        out = pool_forward(np.array([[0.0], [4.0]]), np.array([0, 0]), proj, bias, 1, True)
        np.testing.assert_allclose(out.spreads[0], [4.0])

    def test_pass_through(self) -> None:
        """Test the pass-through projection returns h."""
        h = np.random.default_rng(0).normal(size=(6, 3))
        proj, bias = pass_through_projection(3)
        out = pool_forward(h, np.array([0, 1, 0, 1, 2, 2]), proj, bias, 3)
        np.testing.assert_allclose(out.augmented, h, atol=1e-12)

    def test_feature_layout(self) -> None:
        """Test each row carries [h | log(1 + N) | mu | sigma]."""
        h = np.array([[0.0], [2.0], [5.0]])
        proj, bias = pass_through_projection(1)
        out = pool_forward(h, np.array([0, 0, 1]), proj, bias, 2)
        np.testing.assert_allclose(out.features[0], [0.0, np.log(3.0), 1.0, 1.0])
        np.testing.assert_allclose(out.features[2], [5.0, np.log(2.0), 5.0, 0.0])

    def test_row_permutation_equivariance(self) -> None:
        """Test shuffling the rows shuffles the output the same way."""
        rng = np.random.default_rng(2)
        h = rng.normal(size=(15, 3))
        labels = np.arange(15) % 4
        proj, bias = _random_projection(3, 2)
        out = pool_forward(h, labels, proj, bias, 4)
        for _ in range(5):
            perm = rng.permutation(15)
            shuffled = pool_forward(h[perm], labels[perm], proj, bias, 4)
            np.testing.assert_allclose(shuffled.augmented, out.augmented[perm], atol=1e-12)

    def test_duplicated_cluster_keeps_statistics(self) -> None:
        """Test repeating every member of a cluster leaves its mean and spread unchanged."""
        rng = np.random.default_rng(3)
        h = rng.normal(size=(9, 2))
        labels = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2])
        proj, bias = _random_projection(2, 3)
        out = pool_forward(h, labels, proj, bias, 3)
        members = labels == 1
        doubled = pool_forward(
            np.vstack([h, h[members]]), np.concatenate([labels, labels[members]]), proj, bias, 3
        )
        np.testing.assert_allclose(doubled.means[1], out.means[1], atol=1e-12)
        np.testing.assert_allclose(doubled.spreads[1], out.spreads[1], atol=1e-12)
        assert doubled.counts[1] == 2 * out.counts[1]

    def test_absent_cluster_not_in_stats(self) -> None:
        """Test clusters without members are left out of the stats view."""
        proj, bias = pass_through_projection(1)
        out = pool_forward(np.ones((2, 1)), np.array([0, 0]), proj, bias, 3)
        assert set(out.stats) == {0}
        assert out.counts.tolist() == [2, 0, 0]

    def test_label_out_of_range(self) -> None:
        """Test labels beyond num_clusters raise ParameterError."""
        proj, bias = pass_through_projection(1)
        with pytest.raises(ParameterError):
            pool_forward(np.ones((2, 1)), np.array([0, 3]), proj, bias, 2)

    def test_projection_shape(self) -> None:
        """Test a projection of the wrong shape raises ShapeError."""
        with pytest.raises(ShapeError):
            pool_forward(np.ones((2, 2)), np.array([0, 0]), np.zeros((4, 2)), np.zeros(2), 1)


class TestPoolBackward:
    """Tests for pooled gradients."""

    def test_zero_upstream(self) -> None:
        """Test a zero upstream gradient gives zero gradients."""
        h = np.random.default_rng(1).normal(size=(5, 2))
        proj, bias = _random_projection(2, 1)
        out = pool_forward(h, np.array([0, 0, 1, 1, 1]), proj, bias, 2)
        grad_h, grad_proj, grad_bias = pool_backward(out, np.zeros((5, 2)), h, proj)
        assert not grad_h.any()
        assert not grad_proj.any()
        assert not grad_bias.any()

    def test_singleton_mean_path(self) -> None:
        """Test a one-member cluster passes the mean-path gradient straight through."""
        h = np.array([[3.0]])
        proj = np.zeros((4, 1))
        proj[2, 0] = 1.0  # output = mu
        out = pool_forward(h, np.array([0]), proj, np.zeros(1), 1)
        grad_h, _, _ = pool_backward(out, np.array([[1.0]]), h, proj)
        np.testing.assert_allclose(grad_h, [[1.0]])

    @pytest.mark.parametrize("use_variance", [False, True])
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_finite_differences(self, seed: int, use_variance: bool) -> None:
        """Test h, projection and bias gradients against central differences."""
        rng = np.random.default_rng(seed)
        n, width, k = 12, 4, 3
        h = rng.normal(size=(n, width))
        labels = np.arange(n) % k
        proj, bias = _random_projection(width, seed + 100)
        upstream = rng.normal(size=(n, width))

        out = pool_forward(h, labels, proj, bias, k, use_variance)
        grad_h, grad_proj, grad_bias = pool_backward(out, upstream, h, proj)

        def loss() -> float:
            return float(np.sum(pool_forward(h, labels, proj, bias, k, use_variance).augmented * upstream))

        np.testing.assert_allclose(grad_h, central_difference(loss, h, 1e-6), rtol=1e-4, atol=1e-6)
        np.testing.assert_allclose(grad_proj, central_difference(loss, proj, 1e-6), rtol=1e-4, atol=1e-6)
        np.testing.assert_allclose(grad_bias, central_difference(loss, bias, 1e-6), rtol=1e-4, atol=1e-6)

    def test_shape_mismatch(self) -> None:
        """Test an upstream gradient of the wrong shape raises TraceMismatchError."""
        h = np.ones((2, 1))
        proj, bias = pass_through_projection(1)
        out = pool_forward(h, np.array([0, 0]), proj, bias, 1)
        with pytest.raises(TraceMismatchError):
            pool_backward(out, np.ones((3, 1)), h, proj)


class TestStatPoolLayer:
    """Tests for the trainable hook."""

    def test_requires_labels(self) -> None:
        """Test calling the layer before labels are set raises ParameterError."""
        with pytest.raises(ParameterError):
            StatPoolLayer.pass_through(2, 2)(np.ones((1, 2)))

    def test_backward_before_forward(self) -> None:
        """Test backward without a forward raises TraceMismatchError."""
        with pytest.raises(TraceMismatchError):
            StatPoolLayer.pass_through(2, 2).backward(np.ones((1, 2)))

    def test_apply_gradients(self) -> None:
        """Test one SGD step moves the projection against its gradient."""
        layer = StatPoolLayer.pass_through(1, 1)
        layer.labels = np.array([0, 0])
        h = np.array([[0.0], [2.0]])
        layer(h)
        layer.backward(np.ones((2, 1)))
        expected = layer.proj - 0.5 * layer.grad_proj
        layer.apply_gradients(0.5)
        np.testing.assert_allclose(layer.proj, expected)
        assert layer.width == 1
