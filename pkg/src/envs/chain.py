"""Tabular chain MDP used by the exactness oracles."""

import numpy as np

from src.contracts.errors import ConfigError
from src.envs.base import GoalEnv, GoalEnvSpec
from src.numerics import Array

STAY, FORWARD = 0, 1
NUM_ACTIONS = 2


def chain_mdp_kernel(n: int, p_forward: float) -> Array:
    """
    Transition tensor P[s, a, s'] of the chain.

    ``stay`` keeps the state; ``forward`` moves +1 with probability
    ``p_forward`` and otherwise stays. The last state absorbs.
    """
    if n < 2:
        raise ConfigError(f"chain needs n >= 2, got {n}")
    if not 0.0 < p_forward <= 1.0:
        raise ConfigError(f"p_forward must lie in (0, 1], got {p_forward}")
    kernel = np.zeros((n, NUM_ACTIONS, n))
    for s in range(n):
        kernel[s, STAY, s] = 1.0
        if s == n - 1:
            kernel[s, FORWARD, s] = 1.0
        else:
            kernel[s, FORWARD, s + 1] = p_forward
            kernel[s, FORWARD, s] = 1.0 - p_forward
    return kernel


def discrete_action(action: Array | float) -> int:
    """Continuous action in [-1, 1] -> FORWARD if positive else STAY."""
    return FORWARD if float(np.asarray(action).reshape(-1)[0]) > 0.0 else STAY


class ChainMDP(GoalEnv):
    """
    Chain of ``n`` states starting at 0.

    States are stored as one-element float arrays holding the index.
    """

    name = "chain"

    def __init__(
        self,
        n: int = 5,
        p_forward: float = 0.7,
        episode_len: int = 20,
        success_radius: float = 0.5,
    ) -> None:
        super().__init__(
            GoalEnvSpec(
                state_dim=1,
                action_dim=1,
                goal_dim=1,
                action_low=-1.0,
                action_high=1.0,
                episode_len=episode_len,
                success_radius=success_radius,
            )
        )
        self.n = n
        self.p_forward = p_forward
        self.kernel = chain_mdp_kernel(n, p_forward)

    @property
    def state_feature_dim(self) -> int:
        return self.n

    @property
    def action_feature_dim(self) -> int:
        return NUM_ACTIONS

    @property
    def action_differentiable(self) -> bool:
        return False

    def state_features(self, states: Array) -> Array:
        idx = np.asarray(states, dtype=np.float64).reshape(-1).astype(np.int64)
        return np.eye(self.n)[idx]

    def action_features(self, actions: Array) -> Array:
        raw = np.asarray(actions, dtype=np.float64).reshape(-1)
        return np.eye(NUM_ACTIONS)[(raw > 0.0).astype(np.int64)]

    def sample_goal(self, rng: np.random.Generator) -> Array:
        return np.array([float(rng.integers(0, self.n))])

    def goal_in_range(self, goal: Array) -> bool:
        g = float(goal[0])
        return bool(g == np.floor(g) and 0 <= g < self.n)

    def goal_distance(self, state: Array, goal: Array) -> float:
        return float(abs(state[0] - goal[0]))

    def _initial_state(self, rng: np.random.Generator) -> Array:
        return np.array([0.0])

    def _transition(self, state: Array, action: Array, rng: np.random.Generator) -> Array:
        s = int(state[0])
        probs = self.kernel[s, discrete_action(action)]
        return np.array([float(rng.choice(self.n, p=probs))])
