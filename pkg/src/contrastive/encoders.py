"""The three critic encoders."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError
from src.numerics import Activation, ParamSet, init_param_set


@dataclass(frozen=True)
class EncoderSet:
    """
    psi maps (s, a) features to R^E, phi maps a visited state to R^E, and
    phi_hat maps the (visited, augmented) pair to R^E.
    """

    psi: ParamSet
    phi: ParamSet
    phi_hat: ParamSet

    def __post_init__(self) -> None:
        dims = {self.psi.out_dim, self.phi.out_dim, self.phi_hat.out_dim}
        if len(dims) != 1:
            raise ConfigError(
                f"encoder output dims differ: psi={self.psi.out_dim}, "
                f"phi={self.phi.out_dim}, phi_hat={self.phi_hat.out_dim}"
            )
        if self.phi_hat.in_dim != 2 * self.phi.in_dim:
            raise ConfigError("phi_hat must take the concatenated (visited, augmented) pair")

    @property
    def embed_dim(self) -> int:
        return self.psi.out_dim

    def as_list(self) -> list[ParamSet]:
        return [self.psi, self.phi, self.phi_hat]

    @classmethod
    def from_list(cls, params: Sequence[ParamSet]) -> "EncoderSet":
        psi, phi, phi_hat = params
        return cls(psi=psi, phi=phi, phi_hat=phi_hat)

    def with_zero_boost(self) -> "EncoderSet":
        """Copy with phi_hat's output layer zeroed, so phi_hat outputs 0 everywhere."""
        layers = list(self.phi_hat.copy().layers)
        layers[-1].weight[...] = 0.0
        layers[-1].bias[...] = 0.0
        return EncoderSet(self.psi, self.phi, ParamSet(layers, self.phi_hat.activation))


def init_encoders(
    state_feature_dim: int,
    action_feature_dim: int,
    embed_dim: int,
    hidden_sizes: Sequence[int],
    rng: np.random.Generator,
    activation: Activation = "relu",
) -> EncoderSet:
    """Randomly initialize psi, phi and phi_hat with the same hidden widths."""
    hidden = list(hidden_sizes)
    return EncoderSet(
        psi=init_param_set(
            [state_feature_dim + action_feature_dim, *hidden, embed_dim], rng, activation
        ),
        phi=init_param_set([state_feature_dim, *hidden, embed_dim], rng, activation),
        phi_hat=init_param_set([2 * state_feature_dim, *hidden, embed_dim], rng, activation),
    )
