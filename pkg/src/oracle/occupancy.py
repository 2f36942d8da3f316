"""Exact and Monte-Carlo discounted state occupancy on tabular MDPs."""

import logging
from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError, InputError
from src.numerics import Array

logger = logging.getLogger(__name__)

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class TabularMDP:
    """Transition tensor P[s, a, s'], policy table pi[s, a], and discount gamma."""

    transitions: Array
    policy: Array
    gamma: float

    def __post_init__(self) -> None:
        p = self.transitions
        if p.ndim != 3 or p.shape[0] != p.shape[2]:
            raise ConfigError(f"transition tensor must be (n, A, n), got {p.shape}")
        if self.policy.shape != p.shape[:2]:
            raise ConfigError(f"policy table must be {p.shape[:2]}, got {self.policy.shape}")
        if np.any(p < 0) or not np.allclose(p.sum(axis=2), 1.0, atol=_PROB_TOL):
            raise ConfigError("transition rows must be probability vectors")
        if np.any(self.policy < 0) or not np.allclose(self.policy.sum(axis=1), 1.0, atol=_PROB_TOL):
            raise ConfigError("policy rows must be probability vectors")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def n_states(self) -> int:
        return int(self.transitions.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.transitions.shape[1])

    @classmethod
    def uniform_policy(cls, transitions: Array, gamma: float) -> "TabularMDP":
        n, a, _ = transitions.shape
        return cls(transitions, np.full((n, a), 1.0 / a), gamma)

    def state_kernel(self) -> Array:
        """P_pi[s, s'] = sum_a pi(a|s) P(s'|s,a)."""
        return np.einsum("sa,sat->st", self.policy, self.transitions)


def discounted_occupancy(mdp: TabularMDP, s: int, a: int) -> Array:
    """
    mu(g) = (1 - gamma) sum_t gamma^t P(s_{t+1} = g | s_0 = s, a_0 = a).

    Solved directly as (I - gamma P_pi)^T mu = (1 - gamma) P(. | s, a).
    """
    if not 0 <= s < mdp.n_states or not 0 <= a < mdp.n_actions:
        raise InputError(f"anchor ({s}, {a}) outside the MDP")
    n = mdp.n_states
    system = np.eye(n) - mdp.gamma * mdp.state_kernel()
    mu = np.linalg.solve(system.T, (1.0 - mdp.gamma) * mdp.transitions[s, a])
    return np.clip(mu, 0.0, None)


def occupancy_table(mdp: TabularMDP) -> Array:
    """Occupancy for every anchor, shape (n, A, n)."""
    n = mdp.n_states
    system = np.eye(n) - mdp.gamma * mdp.state_kernel()
    rhs = (1.0 - mdp.gamma) * mdp.transitions.reshape(-1, n).T
    mu = np.linalg.solve(system.T, rhs).T
    return np.clip(mu, 0.0, None).reshape(mdp.transitions.shape)


def _sample_rows(probs: Array, rng: np.random.Generator) -> Array:
    """One categorical draw per row of ``probs`` by inverting the row CDF."""
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0]) * cdf[:, -1]
    return np.minimum((cdf < u[:, None]).sum(axis=1), probs.shape[1] - 1)


def monte_carlo_occupancy(
    mdp: TabularMDP,
    s: int,
    a: int,
    n_episodes: int,
    rng: np.random.Generator,
) -> Array:
    """
    Empirical occupancy from rollouts.

    Each episode draws an offset d ~ Geom(1 - gamma) on {1, 2, ...}, runs d
    transitions from (s, a) under the policy, and records where it lands.
    """
    if n_episodes < 1:
        raise InputError("n_episodes must be positive")
    offsets = rng.geometric(1.0 - mdp.gamma, size=n_episodes)
    states = _sample_rows(np.broadcast_to(mdp.transitions[s, a], (n_episodes, mdp.n_states)), rng)
    landed = np.where(offsets == 1, states, -1)

    for step in range(2, int(offsets.max()) + 1):
        live = np.flatnonzero(offsets >= step)
        cur = states[live]
        actions = _sample_rows(mdp.policy[cur], rng)
        states[live] = _sample_rows(mdp.transitions[cur, actions], rng)
        done = live[offsets[live] == step]
        landed[done] = states[done]

    logger.debug(f"Monte-Carlo occupancy from ({s}, {a}): {n_episodes} episodes, max offset {offsets.max()}")
    return np.bincount(landed, minlength=mdp.n_states) / n_episodes
