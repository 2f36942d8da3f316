"""Critic evaluation: encoder inputs, score matrices, the trainable loss, and Q."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.special import softmax

from src.contracts.errors import ConfigError
from src.contrastive.encoders import EncoderSet
from src.contrastive.estimators import BoolMatrix
from src.contrastive.objectives import CriticObjective, CriticScores, ScoreGrads
from src.numerics import (
    Array,
    ParamSet,
    ensure_finite,
    mlp_backward,
    mlp_forward,
    mlp_forward_cached,
)
from src.replay.batch import ContrastiveBatch

logger = logging.getLogger(__name__)


class Featurizer(Protocol):
    """Maps raw states/goals and actions to encoder inputs. Environments satisfy this."""

    def state_features(self, states: Array) -> Array: ...

    def action_features(self, actions: Array) -> Array: ...


class IdentityFeaturizer:
    """Raw arrays as encoder inputs."""

    def state_features(self, states: Array) -> Array:
        return np.atleast_2d(np.asarray(states, dtype=np.float64))

    def action_features(self, actions: Array) -> Array:
        return np.atleast_2d(np.asarray(actions, dtype=np.float64))


@dataclass(frozen=True)
class CriticInputs:
    """Featurized encoder inputs for one batch."""

    anchors: Array  # (B, state_feat + action_feat)
    visited: Array  # (B, state_feat)
    pairs: Array | None = None  # (B, 2 * state_feat)
    negatives: BoolMatrix | None = None


def anchor_features(featurizer: Featurizer, states: Array, actions: Array) -> Array:
    return np.concatenate(
        [featurizer.state_features(states), featurizer.action_features(actions)], axis=1
    )


def critic_inputs(
    batch: ContrastiveBatch,
    featurizer: Featurizer | None = None,
    mask_same_trajectory: bool = True,
) -> CriticInputs:
    """Featurize a batch; rows from one trajectory are not each other's negatives."""
    f = featurizer or IdentityFeaturizer()
    visited = f.state_features(batch.visited_states)
    pairs = None
    if batch.aug_states is not None:
        pairs = np.concatenate([visited, f.state_features(batch.aug_states)], axis=1)
    return CriticInputs(
        anchors=anchor_features(f, batch.states, batch.actions),
        visited=visited,
        pairs=pairs,
        negatives=batch.negative_mask if mask_same_trajectory else None,
    )


def score_matrices(enc: EncoderSet, inputs: CriticInputs) -> CriticScores:
    """Bilinear scores; the boost is omitted when the batch has no augmented states."""
    u = mlp_forward(enc.psi, inputs.anchors)
    v = mlp_forward(enc.phi, inputs.visited)
    if inputs.pairs is None:
        return CriticScores(s_v=u @ v.T)
    w = mlp_forward(enc.phi_hat, inputs.pairs)
    return CriticScores(s_v=u @ v.T, boost=u @ w.T)


class CriticLoss:
    """
    Critic loss over params [psi, phi, phi_hat] for a fixed batch.

    phi_hat receives a zero gradient when the objective does not use the boost.
    """

    def __init__(self, inputs: CriticInputs, objective: CriticObjective) -> None:
        if objective.needs_augmentation and inputs.pairs is None:
            raise ConfigError(f"method={objective.method.value} needs augmented states")
        self._inputs = inputs
        self._objective = objective
        self._use_boost = objective.needs_augmentation
        self.last_scores: CriticScores | None = None

    def _active_inputs(self) -> CriticInputs:
        if self._use_boost:
            return self._inputs
        return CriticInputs(self._inputs.anchors, self._inputs.visited, None, self._inputs.negatives)

    def scores(self, params: Sequence[ParamSet]) -> CriticScores:
        return score_matrices(EncoderSet.from_list(params), self._active_inputs())

    def score_grads(self, params: Sequence[ParamSet]) -> ScoreGrads:
        return self._objective.score_grads(self.scores(params), self._inputs.negatives)

    def value(self, params: Sequence[ParamSet]) -> float:
        return self.score_grads(params).value

    def value_and_grad(self, params: Sequence[ParamSet]) -> tuple[float, list[ParamSet]]:
        psi, phi, phi_hat = params
        inputs = self._active_inputs()
        u, cache_u = mlp_forward_cached(psi, inputs.anchors)
        v, cache_v = mlp_forward_cached(phi, inputs.visited)
        ensure_finite("psi", u)
        ensure_finite("phi", v)
        if inputs.pairs is None:
            scores = CriticScores(s_v=u @ v.T)
        else:
            w, cache_w = mlp_forward_cached(phi_hat, inputs.pairs)
            ensure_finite("phi_hat", w)
            scores = CriticScores(s_v=u @ v.T, boost=u @ w.T)
        self.last_scores = scores

        g = self._objective.score_grads(scores, inputs.negatives)
        d_u = g.d_s_v @ v
        d_v = g.d_s_v.T @ u
        if inputs.pairs is not None and g.d_boost is not None:
            d_u = d_u + g.d_boost @ w
            d_w = g.d_boost.T @ u
            grad_phi_hat, _ = mlp_backward(phi_hat, cache_w, d_w)
        else:
            grad_phi_hat = phi_hat.zeros_like()

        grad_psi, _ = mlp_backward(psi, cache_u, d_u)
        grad_phi, _ = mlp_backward(phi, cache_v, d_v)
        return g.value, [grad_psi, grad_phi, grad_phi_hat]


# =============================================================================
# Q interface
# =============================================================================


def q_value(
    enc: EncoderSet,
    s: Array,
    a: Array,
    g: Array,
    featurizer: Featurizer | None = None,
) -> Array | float:
    """
    psi(s, a) . phi(g), i.e. the visited-state critic evaluated at s_v = g.

    Batched inputs give one value per row; a single (s, a, g) gives a float.
    """
    f = featurizer or IdentityFeaturizer()
    single = np.asarray(s).ndim == 1 and np.asarray(a).ndim <= 1
    u = mlp_forward(enc.psi, anchor_features(f, np.atleast_2d(s), np.atleast_2d(a)))
    v = mlp_forward(enc.phi, f.state_features(np.atleast_2d(g)))
    q = np.sum(u * v, axis=1)
    return float(q[0]) if single else q


def q_matrix(enc: EncoderSet, anchors: Array, goals: Array) -> Array:
    """q[i, k] = psi(anchor_i) . phi(goal_k) on featurized inputs."""
    return mlp_forward(enc.psi, anchors) @ mlp_forward(enc.phi, goals).T


def critic_occupancy(
    enc: EncoderSet,
    anchors: Array,
    goals: Array,
    log_marginal: Array | None = None,
) -> Array:
    """
    Per-anchor distribution over candidate goals implied by the critic.

    The optimal critic scores log p(g | s, a) - log p(g) up to a per-anchor
    constant, so adding ``log_marginal`` (log of the visited-state marginal over
    the candidates) before the softmax recovers the occupancy itself.
    """
    q = q_matrix(enc, anchors, goals)
    if log_marginal is not None:
        q = q + np.asarray(log_marginal, dtype=np.float64)[None, :]
    return softmax(q, axis=1)
