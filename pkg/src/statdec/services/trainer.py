"""Joint optimization of reconstruction and clustering losses.

Each step trains on one mini-batch:

- the encoder receives lambda * dLc/dz + (1 - lambda) * dLr/dz,
- the decoder (and pooling projection) receive (1 - lambda) * dLr,
- the centroids move by (eta / n) * dLc/dm.

The target P is recomputed over the whole dataset every `update_interval`
steps and frozen in between. Training stops when fewer than a `delta`
fraction of labels change between two P-updates, or after `max_iters`.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from statdec.clustering import (
    ClusterState,
    grad_centroids,
    grad_embedding,
    kl_loss,
    kmeans_init,
    reseed_empty_clusters,
    soft_assign,
    update_centroids,
)
from statdec.errors import DivergenceError, NonFiniteError, ParameterError
from statdec.metrics import ari, clustering_accuracy, nmi
from statdec.models.training import EvaluationPoint, HistoryRecord, TrainConfig, Variant
from statdec.network import (
    POOL_LAYER_INDEX,
    Autoencoder,
    MlpNetwork,
    StatPoolLayer,
    backward,
    decode,
    embed,
    encode,
    reconstruction_grad,
    reconstruction_loss,
)
from statdec.numerics import Matrix, Rng, as_matrix
from statdec.services.pretraining import pretrain
from statdec.services.schedule import BatchSampler, label_change_fraction, lr_at, should_stop

logger = logging.getLogger(__name__)


@dataclass
class TrainHistory:
    records: list[HistoryRecord] = field(default_factory=list)
    evaluations: list[EvaluationPoint] = field(default_factory=list)
    converged: bool = False
    stop_iteration: int = 0
    labels: np.ndarray | None = None
    embeddings: Matrix | None = None


@dataclass
class TrainResult:
    autoencoder: Autoencoder
    cluster_state: ClusterState
    history: TrainHistory
    pool: StatPoolLayer | None = None
    variant: Variant = Variant.STATDEC

    @property
    def encoder(self) -> MlpNetwork:
        return self.autoencoder.encoder

    @property
    def decoder(self) -> MlpNetwork:
        return self.autoencoder.decoder

    @property
    def labels(self) -> np.ndarray:
        return self.history.labels

    @property
    def embeddings(self) -> Matrix:
        return self.history.embeddings


def _build_pool(config: TrainConfig, autoencoder: Autoencoder) -> StatPoolLayer | None:
    if not config.ablation.stat_pooling:
        return None
    decoder = autoencoder.decoder
    if decoder.depth < POOL_LAYER_INDEX + 2:
        raise ParameterError(
            f"statistics pooling needs a decoder with a second hidden layer, got depth {decoder.depth}"
        )
    width = decoder.layers[POOL_LAYER_INDEX].fan_out
    return StatPoolLayer.pass_through(width, config.k, config.pool_variance)


def _evaluate(
    history: TrainHistory, iteration: int, labels: np.ndarray, truth: np.ndarray | None
) -> None:
    if truth is None:
        return
    point = EvaluationPoint(
        iteration=iteration,
        acc=clustering_accuracy(labels, truth),
        nmi=nmi(labels, truth),
        ari=ari(labels, truth),
    )
    history.evaluations.append(point)
    logger.info(f"  it={iteration} ACC={point.acc:.4f} NMI={point.nmi:.4f} ARI={point.ari:.4f}")


def _refresh_target(
    z: Matrix, centroids: Matrix, config: TrainConfig
) -> tuple[ClusterState, Matrix]:
    weighted = config.ablation.weighted_target
    state = ClusterState.compute(z, centroids, config.alpha, config.gamma, weighted)
    centroids, reseeded = reseed_empty_clusters(z, centroids, state.q, state.cardinality)
    if reseeded:
        logger.warning(f"Reseeded empty clusters {reseeded} on low-confidence embeddings")
        state = ClusterState.compute(z, centroids, config.alpha, config.gamma, weighted)
    return state, centroids


def train(
    config: TrainConfig,
    data: Matrix,
    rng: Rng,
    autoencoder: Autoencoder | None = None,
    truth: np.ndarray | None = None,
) -> TrainResult:
    """Run the full clustering pipeline on `data`.

    Pretrains an autoencoder unless one is given (a given one is copied, not
    modified), initializes centroids with k-means on the embeddings, then
    runs the joint loop.

    Args:
        config: Hyperparameters and ablation switches.
        data: (n, d) inputs.
        rng: Drives pretraining, k-means seeding and batch order.
        autoencoder: Pretrained weights to start from.
        truth: Ground-truth labels, used only to log and record ACC/NMI/ARI.

    Raises:
        ParameterError: If k exceeds the number of rows.
        DivergenceError: If the combined loss becomes non-finite.
    """
    data = as_matrix(data)
    n = data.shape[0]
    if config.k > n:
        raise ParameterError(f"cannot form {config.k} clusters from {n} points")
    if truth is not None:
        truth = np.asarray(truth, dtype=np.int64)

    if autoencoder is None:
        autoencoder = pretrain(config, data, rng)
    else:
        autoencoder = autoencoder.copy()
    encoder, decoder = autoencoder.encoder, autoencoder.decoder
    lam = config.lambda_
    variant = config.variant

    z_all = embed(encoder, data)
    centroids, kmeans_labels = kmeans_init(z_all, config.k, rng, config.kmeans_restarts)
    pool = _build_pool(config, autoencoder)
    history = TrainHistory()

    max_iters = config.scaled(config.max_iters)
    logger.info(
        f"Training {variant.value}: n={n}, k={config.k}, lambda={lam:g}, "
        f"max_iters={max_iters}, update_interval={config.update_interval}"
    )
    if max_iters == 0:
        state = ClusterState.compute(
            z_all, centroids, config.alpha, config.gamma, config.ablation.weighted_target
        )
        history.labels = kmeans_labels
        history.embeddings = z_all
        _evaluate(history, 0, kmeans_labels, truth)
        return TrainResult(autoencoder, state, history, pool, variant)

    sampler = BatchSampler(n, config.batch, rng)
    prev_labels: np.ndarray | None = None
    target = group_labels = None
    history.stop_iteration = max_iters

    for it in range(max_iters):
        change = None
        if it % config.update_interval == 0:
            z_all = embed(encoder, data)
            state, centroids = _refresh_target(z_all, centroids, config)
            target, group_labels = state.p, state.labels
            converged = False
            if prev_labels is not None:
                change = label_change_fraction(prev_labels, group_labels)
                converged = should_stop(prev_labels, group_labels, config.delta)
                logger.info(f"P-update it={it}: label change {change:.5f}")
            _evaluate(history, it, group_labels, truth)
            if converged:
                history.converged = True
                history.stop_iteration = it
                logger.info(f"Converged at iteration {it} (change {change:.5f} < {config.delta:g})")
                break
            prev_labels = group_labels

        idx = sampler.next()
        xb, pb = data[idx], target[idx]
        nb = xb.shape[0]
        try:
            z, enc_trace = encode(encoder, xb)
            q = soft_assign(z, centroids, config.alpha)
            if pool is not None:
                pool.labels = group_labels[idx]
            x_rec, dec_trace = decode(decoder, z, pool)

            lc = kl_loss(pb, q) / nb
            lr = reconstruction_loss(xb, x_rec)
            loss = lam * lc + (1.0 - lam) * lr
            if not np.isfinite(loss):
                raise DivergenceError(it)

            dec_grads, grad_z_rec = backward(
                decoder, dec_trace, (1.0 - lam) * reconstruction_grad(xb, x_rec)
            )
            grad_z = grad_z_rec + lam * grad_embedding(z, centroids, pb, q, config.alpha) / nb
            enc_grads, _ = backward(encoder, enc_trace, grad_z)
            grad_m = grad_centroids(z, centroids, pb, q, config.alpha)
        except DivergenceError:
            raise
        except NonFiniteError as e:
            raise DivergenceError(it) from e

        eta = lr_at(it, config)
        centroids = update_centroids(centroids, grad_m, eta, nb)
        encoder.apply_gradients(enc_grads, eta)
        decoder.apply_gradients(dec_grads, eta)
        if pool is not None:
            pool.apply_gradients(eta)

        history.records.append(
            HistoryRecord(
                iteration=it,
                loss=loss,
                clustering_loss=lc,
                reconstruction_loss=lr,
                eta=eta,
                label_change=change,
            )
        )
        logger.debug(f"it={it} L={loss:.6g} Lc={lc:.6g} Lr={lr:.6g} eta={eta:g}")

    z_all = embed(encoder, data)
    state = ClusterState.compute(
        z_all, centroids, config.alpha, config.gamma, config.ablation.weighted_target
    )
    history.labels = state.labels
    history.embeddings = z_all
    if not history.converged:
        _evaluate(history, max_iters, history.labels, truth)
    logger.info(
        f"Finished after {history.stop_iteration} iterations, cluster sizes "
        f"{np.bincount(history.labels, minlength=config.k).tolist()}"
    )
    return TrainResult(autoencoder, state, history, pool, variant)
