"""Tests for soft assignment, frequencies, targets and the KL loss."""

import numpy as np
import pytest

from statdec.clustering import (
    ClusterState,
    assign_labels,
    cluster_frequency,
    dec_target_distribution,
    estimate_cardinality,
    kl_loss,
    sample_frequency,
    soft_assign,
    target_distribution,
)
from statdec.errors import DegenerateAssignmentError, ParameterError, ShapeError


def _random_state(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n, k, d = rng.integers(1, 20), rng.integers(2, 6), rng.integers(1, 5)
    return rng.normal(size=(n, d)) * 3, rng.normal(size=(k, d)) * 3


class TestSoftAssign:
    """Tests for the Student's t kernel."""

    def test_equidistant(self) -> None:
        """Test a point halfway between two centroids splits evenly."""
        q = soft_assign(np.array([[0.0, 0.0]]), np.array([[-1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_allclose(q, [[0.5, 0.5]])

    def test_distances_zero_and_one(self) -> None:
        """Test squared distances [0, 1] give [2/3, 1/3]."""
        q = soft_assign(np.array([[0.0]]), np.array([[0.0], [1.0]]))
        np.testing.assert_allclose(q, [[2 / 3, 1 / 3]])

    def test_three_centroids(self) -> None:
        """Test squared distances [0, 0, 3] give [4/9, 4/9, 1/9]."""
        q = soft_assign(np.array([[0.0, 0.0]]), np.array([[0.0, 0.0], [0.0, 0.0], [np.sqrt(3.0), 0.0]]))
        np.testing.assert_allclose(q, [[4 / 9, 4 / 9, 1 / 9]])

    def test_far_points_do_not_underflow(self) -> None:
        """Test very distant points still give normalized rows."""
        q = soft_assign(np.array([[1e150, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]]))
        assert np.isfinite(q).all()
        assert q.sum() == pytest.approx(1.0)

    def test_rows_sum_to_one(self) -> None:
        """Test Q rows sum to one over many random instances."""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            z, m = _random_state(rng)
            q = soft_assign(z, m)
            np.testing.assert_allclose(q.sum(axis=1), 1.0, atol=1e-12)

    def test_scaling_distances_sharpens(self) -> None:
        """Test multiplying squared distances by c > 1 raises every row maximum."""
        rng = np.random.default_rng(5)
        for _ in range(200):
            z, m = _random_state(rng)
            c = float(rng.uniform(1.5, 10.0))
            q = soft_assign(z, m)
            q_scaled = soft_assign(z * np.sqrt(c), m * np.sqrt(c))
            assert np.all(q_scaled.max(axis=1) >= q.max(axis=1) - 1e-12)

    def test_rejects_bad_alpha(self) -> None:
        """Test a non-positive alpha raises ParameterError."""
        with pytest.raises(ParameterError):
            soft_assign(np.zeros((1, 1)), np.zeros((1, 1)), alpha=0.0)


class TestFrequencies:
    """Tests for u, N and v."""

    def test_cluster_frequency_uniform(self) -> None:
        """Test uniform q over 2 clusters and 4 rows gives [2, 2]."""
        np.testing.assert_allclose(cluster_frequency(np.full((4, 2), 0.5)), [2.0, 2.0])

    def test_cluster_frequency_hard(self) -> None:
        """Test a hard assignment counts rows."""
        np.testing.assert_allclose(cluster_frequency(np.array([[1.0, 0.0], [1.0, 0.0]])), [2.0, 0.0])

    def test_cluster_frequency_soft(self) -> None:
        """Test column sums of a soft assignment."""
        q = np.array([[0.6, 0.4], [0.2, 0.8]])
        np.testing.assert_allclose(cluster_frequency(q), [0.8, 1.2])

    @pytest.mark.parametrize(
        ("q", "expected"),
        [
            ([[1, 0], [1, 0], [0, 1]], [2, 1]),
            ([[0.5, 0.5]], [1, 0]),
            ([[0.6, 0.4], [0.3, 0.7], [0.9, 0.1]], [2, 1]),
        ],
    )
    def test_cardinality(self, q: list[list[float]], expected: list[int]) -> None:
        """Test hard counts, ties going to the lowest index."""
        assert estimate_cardinality(np.array(q, dtype=float)).tolist() == expected

    def test_sample_frequency_confident_member(self) -> None:
        """Test a fully confident member contributes nothing."""
        v = sample_frequency(np.array([[1.0, 0.0]]), np.array([1, 0]))
        assert v[0] == 0.0

    def test_sample_frequency_uniform(self) -> None:
        """Test the hand-evaluated uniform case."""
        v = sample_frequency(np.full((2, 2), 0.5), np.array([1, 1]), gamma=2.0)
        expected = 2 * np.sqrt(2 * 0.25 * np.log(2.0))
        np.testing.assert_allclose(v, [expected, expected])
        assert v[0] == pytest.approx(1.1774, abs=1e-4)

    def test_sample_frequency_grows_for_small_clusters(self) -> None:
        """Test shrinking N_j with q fixed increases v_j."""
        q = np.array([[0.7, 0.3], [0.4, 0.6], [0.8, 0.2]])
        large = sample_frequency(q, np.array([2, 5]))
        small = sample_frequency(q, np.array([2, 1]))
        assert small[1] > large[1]

    def test_sample_frequency_shape(self) -> None:
        """Test a cardinality vector of the wrong length raises ShapeError."""
        with pytest.raises(ShapeError):
            sample_frequency(np.full((1, 2), 0.5), np.array([1, 1, 1]))


class TestTargetDistribution:
    """Tests for P."""

    def test_uniform(self) -> None:
        """Test uniform q with equal weights gives a uniform target."""
        q = np.full((3, 2), 0.5)
        p = target_distribution(q, np.array([1.5, 1.5]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(p, q)

    def test_hand_evaluated(self) -> None:
        """Test the worked single-row example."""
        p = target_distribution(
            np.array([[2 / 3, 1 / 3]]), np.array([2 / 3, 1 / 3]), np.array([1.0, 1.0])
        )
        np.testing.assert_allclose(p, [[0.7619, 0.2381]], atol=1e-4)

    def test_sharpening(self) -> None:
        """Test equal u + v keeps the argmax and never lowers the maximum."""
        rng = np.random.default_rng(1)
        for _ in range(1000):
            z, m = _random_state(rng)
            q = soft_assign(z, m)
            k = q.shape[1]
            u = rng.uniform(0.1, 2.0, size=k)
            v = u.max() + 1.0 - u  # u + v is the same for every cluster
            p = target_distribution(q, u, v)
            np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
            np.testing.assert_array_equal(assign_labels(p), assign_labels(q))
            assert np.all(p.max(axis=1) >= q.max(axis=1) - 1e-12)

    def test_dec_target(self) -> None:
        """Test the unweighted target is q^2 / u renormalized."""
        q = np.array([[0.6, 0.4], [0.1, 0.9]])
        u = cluster_frequency(q)
        raw = q**2 / u
        np.testing.assert_allclose(dec_target_distribution(q, u), raw / raw.sum(axis=1, keepdims=True))

    def test_zero_row(self) -> None:
        """Test an all-zero q row raises DegenerateAssignmentError."""
        with pytest.raises(DegenerateAssignmentError) as exc_info:
            target_distribution(np.array([[0.5, 0.5], [0.0, 0.0]]), np.ones(2), np.ones(2))
        assert exc_info.value.row == 1


class TestKlLoss:
    """Tests for KL(P || Q)."""

    def test_identical(self) -> None:
        """Test KL(P, P) is exactly zero."""
        rng = np.random.default_rng(2)
        for _ in range(1000):
            z, m = _random_state(rng)
            q = soft_assign(z, m)
            assert kl_loss(q, q) == 0.0

    def test_one_hot(self) -> None:
        """Test [1, 0] against [0.5, 0.5] is ln 2."""
        assert kl_loss(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]])) == pytest.approx(np.log(2.0))

    def test_soft(self) -> None:
        """Test the hand-evaluated soft case."""
        expected = 0.75 * np.log(1.5) + 0.25 * np.log(0.5)
        assert kl_loss(np.array([[0.75, 0.25]]), np.array([[0.5, 0.5]])) == pytest.approx(expected)
        assert expected == pytest.approx(0.1308, abs=1e-4)

    def test_non_negative(self) -> None:
        """Test KL is non-negative for random pairs."""
        rng = np.random.default_rng(3)
        for _ in range(1000):
            z, m = _random_state(rng)
            q = soft_assign(z, m)
            p = target_distribution(q, cluster_frequency(q), sample_frequency(q, estimate_cardinality(q)))
            assert kl_loss(p, q) >= 0.0


class TestAssignLabels:
    """Tests for hard labels."""

    @pytest.mark.parametrize(
        ("q", "expected"),
        [([[0.9, 0.1]], [0]), ([[0.5, 0.5]], [0]), ([[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]], [2, 0])],
    )
    def test_examples(self, q: list[list[float]], expected: list[int]) -> None:
        """Test row argmax with ties to the lowest index."""
        assert assign_labels(np.array(q)).tolist() == expected

    def test_monotone_transform_invariance(self) -> None:
        """Test strictly increasing transforms of Q keep the labels."""
        rng = np.random.default_rng(6)
        for _ in range(100):
            q = rng.random((int(rng.integers(1, 30)), int(rng.integers(2, 8)))) + 1e-3
            labels = assign_labels(q)
            for transformed in (np.exp(q), 3.0 * q + 2.0, q**3, np.log(q)):
                np.testing.assert_array_equal(assign_labels(transformed), labels)


class TestClusterState:
    """Tests for the computed snapshot."""

    def test_weighted_state(self) -> None:
        """Test the weighted state matches the individual functions."""
        rng = np.random.default_rng(4)
        z, m = rng.normal(size=(10, 2)), rng.normal(size=(3, 2))
        state = ClusterState.compute(z, m)
        q = soft_assign(z, m)
        np.testing.assert_allclose(state.q, q)
        np.testing.assert_allclose(state.v, sample_frequency(q, estimate_cardinality(q)))
        np.testing.assert_allclose(state.p, target_distribution(q, state.u, state.v))
        assert state.k == 3
        assert state.labels.tolist() == assign_labels(q).tolist()

    def test_unweighted_state(self) -> None:
        """Test weighted=False zeroes v and uses the DEC target."""
        rng = np.random.default_rng(5)
        z, m = rng.normal(size=(10, 2)), rng.normal(size=(3, 2))
        state = ClusterState.compute(z, m, weighted=False)
        assert not state.v.any()
        np.testing.assert_allclose(state.p, dec_target_distribution(state.q, state.u))
