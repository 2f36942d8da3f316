"""Actor objective: maximize the contrastive Q with an entropy bonus."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.actor.policy import (
    PolicyHead,
    PolicyParams,
    gaussian_tanh_log_prob,
    policy_head,
    policy_observation,
    squash,
)
from src.contracts.errors import ConfigError
from src.contrastive import EncoderSet
from src.numerics import (
    Array,
    ForwardCache,
    ParamSet,
    ensure_finite,
    mlp_backward,
    mlp_forward,
    mlp_forward_cached,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _ActorForward:
    head: PolicyHead
    std: Array
    u: Array
    log_prob: Array
    q: Array
    psi_cache: ForwardCache


class ActorLoss:
    """
    mean_i [alpha * log pi(a_i | s_i, g_i) - psi(s_i, a_i) . phi(g_i)] over params [trunk].

    The reparameterization noise is drawn once at construction, so ``value`` is
    a deterministic function of the trunk. Encoders are read but never differentiated.
    """

    def __init__(
        self,
        pi: PolicyParams,
        enc: EncoderSet,
        state_features: Array,
        goal_features: Array,
        alpha: float,
        rng: np.random.Generator | None = None,
        noise: Array | None = None,
    ) -> None:
        if alpha < 0:
            raise ConfigError(f"alpha must be non-negative, got {alpha}")
        self._pi = pi
        self._enc = enc
        self._states = np.atleast_2d(state_features)
        self._goal_embed = mlp_forward(enc.phi, np.atleast_2d(goal_features))
        self._obs = policy_observation(self._states, goal_features)
        self._alpha = alpha
        if noise is None:
            noise = (rng or np.random.default_rng(0)).standard_normal(
                (self._obs.shape[0], pi.action_dim)
            )
        self._noise = np.asarray(noise, dtype=np.float64)
        self.last_log_prob = 0.0

    @property
    def noise(self) -> Array:
        return self._noise

    def _forward(self, trunk: ParamSet) -> _ActorForward:
        pi = self._pi.with_trunk(trunk)
        head = policy_head(pi, self._obs)
        std = np.exp(head.log_std)
        u = head.mean + std * self._noise
        psi_in = np.concatenate([self._states, squash(pi, u)], axis=1)
        psi_out, psi_cache = mlp_forward_cached(self._enc.psi, psi_in)
        return _ActorForward(
            head=head,
            std=std,
            u=u,
            log_prob=gaussian_tanh_log_prob(pi, head, self._noise, u),
            q=np.sum(psi_out * self._goal_embed, axis=1),
            psi_cache=psi_cache,
        )

    def stats(self, params: Sequence[ParamSet]) -> tuple[float, float, float]:
        """(loss, mean log_prob, mean q) at ``params``."""
        fw = self._forward(params[0])
        loss = float(np.mean(self._alpha * fw.log_prob - fw.q))
        return loss, float(np.mean(fw.log_prob)), float(np.mean(fw.q))

    def value(self, params: Sequence[ParamSet]) -> float:
        return self.stats(params)[0]

    def value_and_grad(self, params: Sequence[ParamSet]) -> tuple[float, list[ParamSet]]:
        trunk = params[0]
        fw = self._forward(trunk)
        ensure_finite("log_prob", fw.log_prob)
        ensure_finite("q", fw.q)
        self.last_log_prob = float(np.mean(fw.log_prob))
        n = self._obs.shape[0]
        loss = float(np.mean(self._alpha * fw.log_prob - fw.q))

        # dL/dpsi_out = -phi(g) / n, pulled back to the action columns of psi's input
        _, grad_in = mlp_backward(self._enc.psi, fw.psi_cache, -self._goal_embed / n)
        d_action = grad_in[:, self._states.shape[1] :]

        tanh_u = np.tanh(fw.u)
        d_u = d_action * self._pi.scale * (1.0 - tanh_u**2) + (self._alpha / n) * 2.0 * tanh_u
        d_log_std = (d_u * fw.std * self._noise - self._alpha / n) * fw.head.in_range

        grad_trunk, _ = mlp_backward(trunk, fw.head.cache, np.concatenate([d_u, d_log_std], axis=1))
        return loss, [grad_trunk]


def actor_loss(
    pi: PolicyParams,
    enc: EncoderSet,
    state_features: Array,
    goal_features: Array,
    alpha: float,
    rng: np.random.Generator,
) -> float:
    """One-sample estimate of the actor loss at ``pi``."""
    loss = ActorLoss(pi, enc, state_features, goal_features, alpha, rng)
    return loss.value([pi.trunk])
