"""Fully-connected encoder/decoder with manual reverse-mode differentiation.

Weights are stored as (fan_in, fan_out) so a layer computes `x @ W + b`.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal, Protocol, runtime_checkable

import numpy as np

from statdec.errors import ParameterError, ShapeError, TraceMismatchError
from statdec.numerics import Matrix, Rng, glorot_init, matmul

Activation = Literal["relu", "identity"]

# Index of the decoder layer whose output feeds the pooling hook (second hidden layer).
POOL_LAYER_INDEX = 1


@runtime_checkable
class LayerHook(Protocol):
    """A differentiable transform inserted between two layers."""

    def __call__(self, h: Matrix) -> Matrix: ...

    def backward(self, grad: Matrix) -> Matrix: ...


@dataclass
class Layer:
    weight: Matrix
    bias: np.ndarray
    activation: Activation

    @property
    def fan_in(self) -> int:
        return self.weight.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[1]


@dataclass
class LayerGrad:
    weight: Matrix
    bias: np.ndarray


@dataclass
class MlpNetwork:
    """Ordered affine layers; consecutive widths must chain."""

    layers: list[Layer]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ParameterError("a network needs at least one layer")
        for k in range(len(self.layers) - 1):
            if self.layers[k].fan_out != self.layers[k + 1].fan_in:
                raise ShapeError(
                    f"layer {k} outputs {self.layers[k].fan_out} values but layer {k + 1} "
                    f"expects {self.layers[k + 1].fan_in}"
                )

    @property
    def topology(self) -> list[int]:
        return [self.layers[0].fan_in, *(layer.fan_out for layer in self.layers)]

    @property
    def activations(self) -> list[str]:
        return [layer.activation for layer in self.layers]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def copy(self) -> "MlpNetwork":
        return MlpNetwork(
            [Layer(layer.weight.copy(), layer.bias.copy(), layer.activation) for layer in self.layers]
        )

    def apply_gradients(self, grads: list[LayerGrad], eta: float) -> None:
        """Plain SGD step, in place."""
        if len(grads) != self.depth:
            raise TraceMismatchError(f"{len(grads)} gradients for {self.depth} layers")
        for layer, grad in zip(self.layers, grads, strict=True):
            layer.weight -= eta * grad.weight
            layer.bias -= eta * grad.bias


@dataclass
class Autoencoder:
    encoder: MlpNetwork
    decoder: MlpNetwork

    def copy(self) -> "Autoencoder":
        return Autoencoder(self.encoder.copy(), self.decoder.copy())


@dataclass
class ForwardTrace:
    """Values recorded by `forward` for the backward pass.

    inputs[k] is what layer k multiplied (after its dropout mask), masks[k] the
    scaled mask or None.
    """

    inputs: list[Matrix] = field(default_factory=list)
    pre: list[Matrix] = field(default_factory=list)
    post: list[Matrix] = field(default_factory=list)
    masks: list[Matrix | None] = field(default_factory=list)
    hook: Callable[[Matrix], Matrix] | None = None
    hook_index: int | None = None

    @property
    def depth(self) -> int:
        return len(self.pre)


def build_network(rng: Rng, topology: list[int], activations: list[Activation]) -> MlpNetwork:
    """Glorot-initialized network with zero biases."""
    if len(topology) < 2 or len(activations) != len(topology) - 1:
        raise ParameterError(
            f"topology {topology} does not match {len(activations)} activations"
        )
    layers = [
        Layer(glorot_init(rng, fan_in, fan_out), np.zeros(fan_out), activation)
        for fan_in, fan_out, activation in zip(topology[:-1], topology[1:], activations, strict=True)
    ]
    return MlpNetwork(layers)


def default_activations(depth: int) -> list[Activation]:
    """ReLU on hidden layers, identity on the last one."""
    return ["relu"] * (depth - 1) + ["identity"]


def build_autoencoder(rng: Rng, encoder_topology: list[int]) -> Autoencoder:
    """Mirror-symmetric autoencoder; the embedding and output layers are linear."""
    depth = len(encoder_topology) - 1
    encoder = build_network(rng, encoder_topology, default_activations(depth))
    decoder = build_network(rng, list(reversed(encoder_topology)), default_activations(depth))
    return Autoencoder(encoder, decoder)


def _activate(pre: Matrix, activation: Activation) -> Matrix:
    if activation == "relu":
        return np.maximum(pre, 0.0)
    return pre


def forward(
    net: MlpNetwork,
    x: Matrix,
    dropout_rate: float = 0.0,
    rng: Rng | None = None,
    hook: Callable[[Matrix], Matrix] | None = None,
    hook_index: int | None = None,
) -> tuple[Matrix, ForwardTrace]:
    """Run `net` on a batch, recording everything backward needs.

    With dropout_rate > 0 every layer input is masked (inverted dropout, so the
    expected activation is unchanged). `hook`, if given, replaces the output of
    layer `hook_index` before the next layer sees it.
    """
    if not 0.0 <= dropout_rate < 1.0:
        raise ParameterError(f"dropout rate must be in [0, 1), got {dropout_rate}")
    if dropout_rate > 0 and rng is None:
        raise ParameterError("dropout needs a random generator")
    if x.ndim != 2 or x.shape[1] != net.layers[0].fan_in:
        raise ShapeError(f"network expects width {net.layers[0].fan_in}, got input {x.shape}")
    if hook is not None and (hook_index is None or not 0 <= hook_index < net.depth - 1):
        raise ParameterError(f"hook index {hook_index} is not a hidden layer of depth {net.depth}")

    trace = ForwardTrace(hook=hook, hook_index=hook_index if hook is not None else None)
    keep = 1.0 - dropout_rate
    a = x
    for k, layer in enumerate(net.layers):
        mask = None
        if dropout_rate > 0:
            mask = (rng.random(a.shape) < keep) / keep
            a = a * mask
        pre = matmul(a, layer.weight) + layer.bias
        post = _activate(pre, layer.activation)
        trace.inputs.append(a)
        trace.pre.append(pre)
        trace.post.append(post)
        trace.masks.append(mask)
        a = hook(post) if hook is not None and k == hook_index else post
    return a, trace


def backward(
    net: MlpNetwork, trace: ForwardTrace, grad_out: Matrix
) -> tuple[list[LayerGrad], Matrix]:
    """Backpropagate dLoss/dOutput through `net`.

    Returns:
        Per-layer gradients and the gradient with respect to the network input.

    Raises:
        TraceMismatchError: If the trace was not produced by this network.
    """
    if trace.depth != net.depth:
        raise TraceMismatchError(f"trace depth {trace.depth} != network depth {net.depth}")
    for k, layer in enumerate(net.layers):
        if trace.inputs[k].shape[1] != layer.fan_in or trace.pre[k].shape[1] != layer.fan_out:
            raise TraceMismatchError(f"trace shapes drifted from layer {k}")
    if grad_out.shape != trace.post[-1].shape:
        raise TraceMismatchError(
            f"output gradient {grad_out.shape} does not match output {trace.post[-1].shape}"
        )

    grads: list[LayerGrad] = [None] * net.depth  # type: ignore[list-item]
    g = grad_out
    for k in reversed(range(net.depth)):
        layer = net.layers[k]
        if trace.hook is not None and k == trace.hook_index:
            if not isinstance(trace.hook, LayerHook):
                raise TraceMismatchError("the forward hook has no backward pass")
            g = trace.hook.backward(g)
        if layer.activation == "relu":
            g = g * (trace.pre[k] > 0)
        grads[k] = LayerGrad(weight=trace.inputs[k].T @ g, bias=g.sum(axis=0))
        g = g @ layer.weight.T
        if trace.masks[k] is not None:
            g = g * trace.masks[k]
    return grads, g


def encode(
    net: MlpNetwork, x: Matrix, dropout_rate: float = 0.0, rng: Rng | None = None
) -> tuple[Matrix, ForwardTrace]:
    """Map inputs to embeddings with the encoder f_theta."""
    return forward(net, x, dropout_rate, rng)


def decode(
    net: MlpNetwork, z: Matrix, pool_hook: Callable[[Matrix], Matrix] | None = None
) -> tuple[Matrix, ForwardTrace]:
    """Reconstruct inputs with the decoder g_theta'.

    `pool_hook` is applied to the second hidden layer's activations.
    """
    hook_index = None
    if pool_hook is not None:
        hook_index = POOL_LAYER_INDEX
        if net.depth < hook_index + 2:
            raise ParameterError(f"a depth-{net.depth} decoder has no second hidden layer")
    return forward(net, z, hook=pool_hook, hook_index=hook_index)


def embed(encoder: MlpNetwork, x: Matrix) -> Matrix:
    """Embeddings without dropout; the trace is discarded."""
    z, _ = encode(encoder, x)
    return z


def reconstruction_loss(x: Matrix, x_rec: Matrix) -> float:
    """Sum of squared residuals divided by the batch size."""
    if x.shape != x_rec.shape:
        raise ShapeError(f"cannot compare {x.shape} with {x_rec.shape}")
    residual = x - x_rec
    return float(np.sum(residual * residual) / x.shape[0])


def reconstruction_grad(x: Matrix, x_rec: Matrix) -> Matrix:
    """dL_r / dx_rec for the batch-mean loss."""
    if x.shape != x_rec.shape:
        raise ShapeError(f"cannot compare {x.shape} with {x_rec.shape}")
    return 2.0 * (x_rec - x) / x.shape[0]


def backward_reconstruction(
    autoencoder: Autoencoder,
    encoder_trace: ForwardTrace,
    decoder_trace: ForwardTrace,
    x: Matrix,
    x_rec: Matrix,
) -> tuple[list[LayerGrad], list[LayerGrad]]:
    """Gradients of L_r for theta (encoder) and theta' (decoder)."""
    decoder_grads, grad_z = backward(autoencoder.decoder, decoder_trace, reconstruction_grad(x, x_rec))
    encoder_grads, _ = backward(autoencoder.encoder, encoder_trace, grad_z)
    return encoder_grads, decoder_grads
