"""Parameter containers for the small multilayer perceptrons used everywhere."""

import hashlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from src.contracts.errors import ConfigError

Array = NDArray[np.float64]
Activation = Literal["relu", "tanh"]


@dataclass
class Layer:
    """Affine layer: weight (out x in) and bias (out,)."""

    weight: Array
    bias: Array

    @property
    def in_dim(self) -> int:
        return int(self.weight.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weight.shape[0])


@dataclass
class ParamSet:
    """
    Parameters of one MLP.

    Hidden layers use ``activation``; the output layer is always the identity.
    """

    layers: list[Layer]
    activation: Activation = "relu"

    def __post_init__(self) -> None:
        if not self.layers:
            raise ConfigError("ParamSet needs at least one layer")
        if self.activation not in ("relu", "tanh"):
            raise ConfigError(f"Unknown activation: {self.activation}")
        for i, layer in enumerate(self.layers):
            if layer.weight.ndim != 2 or layer.bias.shape != (layer.out_dim,):
                raise ConfigError(f"Layer {i} has inconsistent weight/bias shapes")
            if i > 0 and layer.in_dim != self.layers[i - 1].out_dim:
                raise ConfigError(
                    f"Layer {i} expects {layer.in_dim} inputs but layer {i - 1} "
                    f"produces {self.layers[i - 1].out_dim}"
                )

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def num_params(self) -> int:
        return sum(a.size for a in self.arrays())

    def arrays(self) -> list[Array]:
        """Flat list of arrays in declaration order (W0, b0, W1, b1, ...)."""
        out: list[Array] = []
        for layer in self.layers:
            out.append(layer.weight)
            out.append(layer.bias)
        return out

    def map(self, fn: Callable[[Array], Array]) -> "ParamSet":
        """Apply ``fn`` to every array and return a new ParamSet."""
        return ParamSet(
            layers=[Layer(fn(layer.weight), fn(layer.bias)) for layer in self.layers],
            activation=self.activation,
        )

    def zip_map(self, other: "ParamSet", fn: Callable[[Array, Array], Array]) -> "ParamSet":
        """Combine two identically shaped ParamSets array by array."""
        if self.shapes() != other.shapes():
            raise ConfigError("ParamSet shape mismatch")
        return ParamSet(
            layers=[
                Layer(fn(a.weight, b.weight), fn(a.bias, b.bias))
                for a, b in zip(self.layers, other.layers, strict=True)
            ],
            activation=self.activation,
        )

    def with_arrays(self, arrays: Sequence[Array]) -> "ParamSet":
        """Return a ParamSet with the same structure holding ``arrays``."""
        if len(arrays) != 2 * len(self.layers):
            raise ConfigError("Array count does not match layer structure")
        layers = [Layer(arrays[2 * i], arrays[2 * i + 1]) for i in range(len(self.layers))]
        return ParamSet(layers=layers, activation=self.activation)

    def shapes(self) -> list[tuple[int, ...]]:
        return [a.shape for a in self.arrays()]

    def copy(self) -> "ParamSet":
        return self.map(np.copy)

    def zeros_like(self) -> "ParamSet":
        return self.map(np.zeros_like)

    def flatten(self) -> Array:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unflatten(self, vector: Array) -> "ParamSet":
        """Build a ParamSet shaped like this one from a flat vector."""
        if vector.size != self.num_params:
            raise ConfigError(
                f"Expected {self.num_params} values, got {vector.size}"
            )
        layers: list[Layer] = []
        offset = 0
        for layer in self.layers:
            w_size = layer.weight.size
            weight = vector[offset : offset + w_size].reshape(layer.weight.shape).copy()
            offset += w_size
            bias = vector[offset : offset + layer.out_dim].copy()
            offset += layer.out_dim
            layers.append(Layer(weight, bias))
        return ParamSet(layers=layers, activation=self.activation)

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(a))) for a in self.arrays())

    def digest(self) -> str:
        """SHA-256 of the raw parameter bytes."""
        h = hashlib.sha256()
        for a in self.arrays():
            h.update(np.ascontiguousarray(a, dtype=np.float64).tobytes())
        return h.hexdigest()


def init_param_set(
    sizes: Sequence[int],
    rng: np.random.Generator,
    activation: Activation = "relu",
    output_scale: float = 1.0,
) -> ParamSet:
    """
    Create a randomly initialized MLP.

    Args:
        sizes: Layer widths including input and output, e.g. (d_in, 64, 64, d_out).
        rng: Random generator.
        activation: Hidden activation.
        output_scale: Multiplier for the output layer's initial weights.

    Returns:
        Initialized ParamSet (He-normal hidden layers, LeCun-normal output).
    """
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ConfigError(f"Invalid layer sizes: {list(sizes)}")
    layers: list[Layer] = []
    n_layers = len(sizes) - 1
    for i in range(n_layers):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        is_output = i == n_layers - 1
        gain = 1.0 if is_output else 2.0
        std = np.sqrt(gain / fan_in) * (output_scale if is_output else 1.0)
        weight = rng.normal(0.0, std, size=(fan_out, fan_in))
        bias = np.zeros(fan_out)
        layers.append(Layer(weight, bias))
    return ParamSet(layers=layers, activation=activation)
