"""Autoencoder, statistics pooling and checkpoint I/O."""

from statdec.network.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from statdec.network.mlp import (
    POOL_LAYER_INDEX,
    Autoencoder,
    ForwardTrace,
    Layer,
    LayerGrad,
    LayerHook,
    MlpNetwork,
    backward,
    backward_reconstruction,
    build_autoencoder,
    build_network,
    decode,
    embed,
    encode,
    forward,
    reconstruction_grad,
    reconstruction_loss,
)
from statdec.network.statpool import (
    ClusterStats,
    PoolOutput,
    StatPoolLayer,
    pass_through_projection,
    pool_backward,
    pool_forward,
)

__all__ = [
    "POOL_LAYER_INDEX",
    "Autoencoder",
    "Checkpoint",
    "ClusterStats",
    "ForwardTrace",
    "Layer",
    "LayerGrad",
    "LayerHook",
    "MlpNetwork",
    "PoolOutput",
    "StatPoolLayer",
    "backward",
    "backward_reconstruction",
    "build_autoencoder",
    "build_network",
    "decode",
    "embed",
    "encode",
    "forward",
    "load_checkpoint",
    "pass_through_projection",
    "pool_backward",
    "pool_forward",
    "reconstruction_grad",
    "reconstruction_loss",
    "save_checkpoint",
]
