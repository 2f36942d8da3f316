"""Forward and backward passes for ParamSet MLPs."""

from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError
from src.numerics.params import Array, Layer, ParamSet


@dataclass
class ForwardCache:
    """Intermediate values kept for the backward pass."""

    inputs: list[Array]  # input to each layer, shape (N, in_i)
    hidden: list[Array]  # post-activation of each hidden layer
    squeeze: bool


def _activate(z: Array, activation: str) -> Array:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activation_grad(post: Array, activation: str) -> Array:
    if activation == "relu":
        return (post > 0.0).astype(np.float64)
    return 1.0 - post**2


def mlp_forward_cached(params: ParamSet, x: Array) -> tuple[Array, ForwardCache]:
    """
    Evaluate the MLP and keep what the backward pass needs.

    Args:
        params: Network parameters.
        x: Input of shape (d_in,) or (N, d_in).

    Returns:
        Tuple of (output, cache). Output keeps the batch rank of ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.ndim != 2 or h.shape[1] != params.in_dim:
        raise ConfigError(
            f"MLP expects input width {params.in_dim}, got shape {tuple(x.shape)}"
        )
    inputs: list[Array] = []
    hidden: list[Array] = []
    last = len(params.layers) - 1
    for i, layer in enumerate(params.layers):
        inputs.append(h)
        z = h @ layer.weight.T + layer.bias
        if i < last:
            h = _activate(z, params.activation)
            hidden.append(h)
        else:
            h = z
    out = h[0] if squeeze else h
    return out, ForwardCache(inputs=inputs, hidden=hidden, squeeze=squeeze)


def mlp_forward(params: ParamSet, x: Array) -> Array:
    """Evaluate the MLP on ``x`` (pure function)."""
    out, _ = mlp_forward_cached(params, x)
    return out


def mlp_backward(
    params: ParamSet,
    cache: ForwardCache,
    grad_out: Array,
) -> tuple[ParamSet, Array]:
    """
    Backpropagate ``grad_out`` through the network.

    Args:
        params: Parameters used in the forward pass.
        cache: Cache returned by ``mlp_forward_cached``.
        grad_out: Gradient of the loss w.r.t. the network output.

    Returns:
        Tuple of (parameter gradients, gradient w.r.t. the input).
    """
    delta = np.asarray(grad_out, dtype=np.float64)
    if cache.squeeze:
        delta = delta[None, :]
    grads: list[Layer] = []
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        a_in = cache.inputs[i]
        grads.append(Layer(weight=delta.T @ a_in, bias=delta.sum(axis=0)))
        delta = delta @ layer.weight
        if i > 0:
            delta = delta * _activation_grad(cache.hidden[i - 1], params.activation)
    grads.reverse()
    grad_in = delta[0] if cache.squeeze else delta
    return ParamSet(layers=grads, activation=params.activation), grad_in
