"""Statistics pooling over decoder activations grouped by cluster.

Every sample is extended with the statistics of its cluster,
`[h_i | log(1 + N_k) | mu_k | sigma_k]`, and projected back to the width of h by
a learned affine map. Cluster membership comes from hard labels and is treated
as a constant; gradients flow through mu and sigma only.
"""

import logging
from dataclasses import dataclass

import numpy as np

from statdec.errors import ParameterError, ShapeError, TraceMismatchError
from statdec.numerics import Matrix, matmul

logger = logging.getLogger(__name__)

# Guard for the sigma backward at zero spread.
SIGMA_EPS = 1e-8


@dataclass
class ClusterStats:
    cardinality: int
    mu: np.ndarray
    sigma: np.ndarray


@dataclass
class PoolOutput:
    """Result of `pool_forward`.

    counts/means/spreads have one row per cluster id; clusters absent from
    the batch have count 0 and zero statistics.
    """

    counts: np.ndarray
    means: Matrix
    spreads: Matrix
    groups: np.ndarray
    features: Matrix
    augmented: Matrix
    use_variance: bool = False

    @property
    def stats(self) -> dict[int, ClusterStats]:
        """Per-cluster records for the clusters present in the batch."""
        return {
            int(k): ClusterStats(int(self.counts[k]), self.means[k], self.spreads[k])
            for k in np.flatnonzero(self.counts)
        }


def feature_width(width: int) -> int:
    """Width of the concatenated per-sample feature for activations of `width`."""
    return 3 * width + 1


def pass_through_projection(width: int) -> tuple[Matrix, np.ndarray]:
    """Projection that returns h unchanged: identity over h, zero over the stats."""
    proj = np.zeros((feature_width(width), width))
    proj[:width] = np.eye(width)
    return proj, np.zeros(width)


def pool_forward(
    h: Matrix,
    labels: np.ndarray,
    proj: Matrix,
    proj_bias: np.ndarray,
    num_clusters: int,
    use_variance: bool = False,
) -> PoolOutput:
    """Concatenate cluster statistics onto each row of h and project back.

    Raises:
        ParameterError: If a label is outside [0, num_clusters).
        ShapeError: If labels, h and the projection do not line up.
    """
    n, width = h.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ShapeError(f"{labels.shape[0]} labels for {n} rows")
    if n and (labels.min() < 0 or labels.max() >= num_clusters):
        raise ParameterError(f"labels must lie in [0, {num_clusters})")
    if proj.shape != (feature_width(width), width) or proj_bias.shape != (width,):
        raise ShapeError(
            f"projection {proj.shape} / bias {proj_bias.shape} do not fit width {width}"
        )

    counts = np.bincount(labels, minlength=num_clusters)
    means = np.zeros((num_clusters, width))
    np.add.at(means, labels, h)
    present = counts > 0
    means[present] /= counts[present, None]
    centered = h - means[labels]
    second = np.zeros((num_clusters, width))
    np.add.at(second, labels, centered * centered)
    second[present] /= counts[present, None]
    spreads = second if use_variance else np.sqrt(second)

    features = np.hstack(
        [h, np.log1p(counts[labels])[:, None].astype(np.float64), means[labels], spreads[labels]]
    )
    augmented = matmul(features, proj) + proj_bias
    return PoolOutput(
        counts=counts,
        means=means,
        spreads=spreads,
        groups=labels,
        features=features,
        augmented=augmented,
        use_variance=use_variance,
    )


def pool_backward(
    pool_out: PoolOutput, grad_augmented: Matrix, h: Matrix, proj: Matrix
) -> tuple[Matrix, Matrix, np.ndarray]:
    """Exact gradients of a loss of `augmented` w.r.t. h, proj and the bias.

    Raises:
        TraceMismatchError: If the shapes differ from the forward pass.
    """
    n, width = h.shape
    if (
        grad_augmented.shape != pool_out.augmented.shape
        or pool_out.features.shape != (n, feature_width(width))
        or proj.shape != (feature_width(width), width)
    ):
        raise TraceMismatchError(
            f"gradient {grad_augmented.shape} does not match the pooled forward pass"
        )

    grad_proj = pool_out.features.T @ grad_augmented
    grad_bias = grad_augmented.sum(axis=0)
    grad_features = grad_augmented @ proj.T

    grad_h = grad_features[:, :width].copy()
    grad_mu = grad_features[:, width + 1 : 2 * width + 1]
    grad_spread = grad_features[:, 2 * width + 1 :]

    labels = pool_out.groups
    num_clusters = pool_out.counts.shape[0]
    counts = np.maximum(pool_out.counts, 1)[:, None]

    # mean: every member receives the cluster's summed gradient / N_k
    mu_total = np.zeros((num_clusters, width))
    np.add.at(mu_total, labels, grad_mu)
    grad_h += (mu_total / counts)[labels]

    # spread: d sigma / d h_i = (h_i - mu) / (N sigma), d var / d h_i = 2 (h_i - mu) / N
    spread_total = np.zeros((num_clusters, width))
    np.add.at(spread_total, labels, grad_spread)
    centered = h - pool_out.means[labels]
    if pool_out.use_variance:
        scale = 2.0 / counts
    else:
        scale = 1.0 / (counts * np.maximum(pool_out.spreads, SIGMA_EPS))
    grad_h += spread_total[labels] * centered * scale[labels]
    return grad_h, grad_proj, grad_bias


class StatPoolLayer:
    """Trainable pooling hook for the decoder.

    Set `labels` to the cluster ids of the current batch before each forward.
    """

    def __init__(
        self,
        proj: Matrix,
        proj_bias: np.ndarray,
        num_clusters: int,
        use_variance: bool = False,
    ):
        self.proj = proj
        self.proj_bias = proj_bias
        self.num_clusters = num_clusters
        self.use_variance = use_variance
        self.labels: np.ndarray | None = None
        self._h: Matrix | None = None
        self._out: PoolOutput | None = None
        self.grad_proj: Matrix | None = None
        self.grad_bias: np.ndarray | None = None

    @classmethod
    def pass_through(
        cls, width: int, num_clusters: int, use_variance: bool = False
    ) -> "StatPoolLayer":
        proj, bias = pass_through_projection(width)
        return cls(proj, bias, num_clusters, use_variance)

    @property
    def width(self) -> int:
        return self.proj.shape[1]

    def __call__(self, h: Matrix) -> Matrix:
        if self.labels is None:
            raise ParameterError("pooling labels must be set before the forward pass")
        self._h = h
        self._out = pool_forward(
            h, self.labels, self.proj, self.proj_bias, self.num_clusters, self.use_variance
        )
        return self._out.augmented

    def backward(self, grad: Matrix) -> Matrix:
        if self._out is None or self._h is None:
            raise TraceMismatchError("backward called before forward")
        grad_h, self.grad_proj, self.grad_bias = pool_backward(self._out, grad, self._h, self.proj)
        return grad_h

    def apply_gradients(self, eta: float) -> None:
        """SGD step on the projection with the gradients from the last backward."""
        if self.grad_proj is None or self.grad_bias is None:
            return
        self.proj -= eta * self.grad_proj
        self.proj_bias -= eta * self.grad_bias
