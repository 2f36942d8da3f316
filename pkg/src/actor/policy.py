"""Goal-conditioned tanh-Gaussian policy."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError
from src.numerics import Activation, Array, ForwardCache, ParamSet, init_param_set, mlp_forward_cached

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class PolicyParams:
    """Trunk mapping [state features, goal features] to (mean, log_std) per action dim."""

    trunk: ParamSet
    action_low: float = -1.0
    action_high: float = 1.0

    def __post_init__(self) -> None:
        if self.trunk.out_dim % 2:
            raise ConfigError("policy trunk must output (mean, log_std) pairs")
        if self.action_high <= self.action_low:
            raise ConfigError("action bounds must satisfy low < high")

    @property
    def action_dim(self) -> int:
        return self.trunk.out_dim // 2

    @property
    def scale(self) -> float:
        return 0.5 * (self.action_high - self.action_low)

    @property
    def center(self) -> float:
        return 0.5 * (self.action_high + self.action_low)

    def with_trunk(self, trunk: ParamSet) -> "PolicyParams":
        return PolicyParams(trunk, self.action_low, self.action_high)


@dataclass(frozen=True)
class PolicyHead:
    """Trunk outputs for a batch plus what the backward pass needs."""

    mean: Array
    log_std: Array
    in_range: Array  # 1.0 where log_std was not clipped
    cache: ForwardCache


def init_policy(
    observation_dim: int,
    action_dim: int,
    hidden_sizes: Sequence[int],
    rng: np.random.Generator,
    activation: Activation = "relu",
    action_low: float = -1.0,
    action_high: float = 1.0,
) -> PolicyParams:
    """Random trunk with a small output layer so initial actions are near the center."""
    trunk = init_param_set(
        [observation_dim, *hidden_sizes, 2 * action_dim], rng, activation, output_scale=0.1
    )
    return PolicyParams(trunk, action_low, action_high)


def policy_observation(state_features: Array, goal_features: Array) -> Array:
    return np.concatenate([np.atleast_2d(state_features), np.atleast_2d(goal_features)], axis=1)


def policy_head(pi: PolicyParams, observations: Array) -> PolicyHead:
    out, cache = mlp_forward_cached(pi.trunk, np.atleast_2d(observations))
    a = pi.action_dim
    raw_log_std = out[:, a:]
    log_std = np.clip(raw_log_std, LOG_STD_MIN, LOG_STD_MAX)
    in_range = ((raw_log_std > LOG_STD_MIN) & (raw_log_std < LOG_STD_MAX)).astype(np.float64)
    return PolicyHead(mean=out[:, :a], log_std=log_std, in_range=in_range, cache=cache)


def log_one_minus_tanh_sq(u: Array) -> Array:
    """log(1 - tanh(u)^2), stable for large |u|."""
    return 2.0 * (np.log(2.0) - u - np.logaddexp(0.0, -2.0 * u))


def squash(pi: PolicyParams, u: Array) -> Array:
    return pi.center + pi.scale * np.tanh(u)


def gaussian_tanh_log_prob(pi: PolicyParams, head: PolicyHead, noise: Array, u: Array) -> Array:
    """Per-row log density of the squashed, rescaled action."""
    per_dim = (
        -0.5 * noise**2
        - head.log_std
        - _HALF_LOG_2PI
        - log_one_minus_tanh_sq(u)
        - np.log(pi.scale)
    )
    return per_dim.sum(axis=1)


def policy_sample(
    pi: PolicyParams,
    state_features: Array,
    goal_features: Array,
    rng: np.random.Generator,
) -> tuple[Array, Array]:
    """
    Reparameterized sample a = center + scale * tanh(mean + std * xi).

    Returns:
        Tuple of (actions (N, A), log_prob (N,)).
    """
    head = policy_head(pi, policy_observation(state_features, goal_features))
    noise = rng.standard_normal(head.mean.shape)
    u = head.mean + np.exp(head.log_std) * noise
    return squash(pi, u), gaussian_tanh_log_prob(pi, head, noise, u)


def greedy_action(pi: PolicyParams, state_features: Array, goal_features: Array) -> Array:
    """Mean action squashed to bounds."""
    head = policy_head(pi, policy_observation(state_features, goal_features))
    return squash(pi, head.mean)
