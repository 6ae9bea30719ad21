"""Greedy layer-wise pretraining followed by end-to-end fine-tuning."""

import logging

import numpy as np

from statdec.errors import DivergenceError, NonFiniteError, ParameterError
from statdec.models.training import TrainConfig
from statdec.network.mlp import (
    Autoencoder,
    MlpNetwork,
    backward,
    backward_reconstruction,
    build_autoencoder,
    decode,
    encode,
    forward,
    reconstruction_grad,
    reconstruction_loss,
)
from statdec.numerics import Matrix, Rng, as_matrix
from statdec.services.schedule import BatchSampler, lr_at

logger = logging.getLogger(__name__)

# Steps between DEBUG loss lines.
LOG_EVERY = 1000


def layer_pair(autoencoder: Autoencoder, k: int) -> MlpNetwork:
    """Encoder layer k stacked with its mirror decoder layer.

    The pair shares Layer objects with the autoencoder, so training it in
    place trains the autoencoder.
    """
    depth = autoencoder.encoder.depth
    return MlpNetwork([autoencoder.encoder.layers[k], autoencoder.decoder.layers[depth - 1 - k]])


def _check_finite(loss: float, iteration: int, phase: str) -> None:
    if not np.isfinite(loss):
        raise DivergenceError(iteration, f"non-finite {phase} loss at iteration {iteration}")


def pretrain_layer_pair(
    pair: MlpNetwork, h: Matrix, config: TrainConfig, rng: Rng, iterations: int
) -> float:
    """Train one pair to reconstruct its clean input h from dropout-corrupted input.

    Returns:
        The loss of the last step (nan when iterations is 0).
    """
    sampler = BatchSampler(h.shape[0], config.batch, rng)
    loss = float("nan")
    for it in range(iterations):
        hb = h[sampler.next()]
        try:
            out, trace = forward(pair, hb, config.dropout, rng)
            loss = reconstruction_loss(hb, out)
            _check_finite(loss, it, "layer-wise")
            grads, _ = backward(pair, trace, reconstruction_grad(hb, out))
        except DivergenceError:
            raise
        except NonFiniteError as e:
            raise DivergenceError(it) from e
        pair.apply_gradients(grads, lr_at(it, config))
        if it % LOG_EVERY == 0:
            logger.debug(f"  layer-wise it={it} Lr={loss:.6g}")
    return loss


def finetune(autoencoder: Autoencoder, x: Matrix, config: TrainConfig, rng: Rng, iterations: int) -> float:
    """End-to-end reconstruction training without dropout."""
    sampler = BatchSampler(x.shape[0], config.batch, rng)
    loss = float("nan")
    for it in range(iterations):
        xb = x[sampler.next()]
        try:
            z, enc_trace = encode(autoencoder.encoder, xb)
            x_rec, dec_trace = decode(autoencoder.decoder, z)
            loss = reconstruction_loss(xb, x_rec)
            _check_finite(loss, it, "fine-tuning")
            enc_grads, dec_grads = backward_reconstruction(autoencoder, enc_trace, dec_trace, xb, x_rec)
        except DivergenceError:
            raise
        except NonFiniteError as e:
            raise DivergenceError(it) from e
        eta = lr_at(it, config)
        autoencoder.encoder.apply_gradients(enc_grads, eta)
        autoencoder.decoder.apply_gradients(dec_grads, eta)
        if it % LOG_EVERY == 0:
            logger.debug(f"  fine-tune it={it} Lr={loss:.6g}")
    return loss


def pretrain(config: TrainConfig, x: Matrix, rng: Rng) -> Autoencoder:
    """Build and pretrain the autoencoder for inputs x.

    Each encoder/decoder layer pair is trained in turn on the clean
    activations of the layers below it, with dropout on every layer input.
    The stacked autoencoder is then fine-tuned end to end. Iteration counts
    are `pretrain_iters` per pair and `finetune_iters`, both divided by
    `config.scale`.

    Raises:
        ParameterError: If x has no rows.
        DivergenceError: If a loss becomes non-finite.
    """
    x = as_matrix(x)
    if x.shape[0] == 0:
        raise ParameterError("cannot pretrain on an empty dataset")

    autoencoder = build_autoencoder(rng, config.encoder_topology(x.shape[1]))
    pair_iters = config.scaled(config.pretrain_iters)
    depth = autoencoder.encoder.depth

    h = x
    for k in range(depth):
        pair = layer_pair(autoencoder, k)
        loss = pretrain_layer_pair(pair, h, config, rng, pair_iters)
        logger.info(f"Pretrained layer pair {k + 1}/{depth} ({pair.topology}): Lr={loss:.6g}")
        h, _ = forward(MlpNetwork([autoencoder.encoder.layers[k]]), h)

    loss = finetune(autoencoder, x, config, rng, config.scaled(config.finetune_iters))
    logger.info(
        f"Fine-tuned autoencoder for {config.scaled(config.finetune_iters)} iterations: Lr={loss:.6g}"
    )
    return autoencoder
