"""One-dimensional valve rotation on the circle."""

import numpy as np

from src.envs.base import GoalEnv, GoalEnvSpec
from src.numerics import Array

ANGLE_STEP = 0.1


def wrap_angle(angle: Array | float) -> Array:
    """Map angles into [-pi, pi)."""
    return np.mod(np.asarray(angle, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi


def circular_distance(a: Array | float, b: Array | float) -> Array:
    return np.abs(wrap_angle(np.asarray(a) - np.asarray(b)))


class ValveTurn1D(GoalEnv):
    """Valve angle advanced by ``0.1 * action`` radians per step."""

    name = "valve_turn"

    def __init__(self, episode_len: int = 50, success_radius: float = 0.15) -> None:
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

    @property
    def state_feature_dim(self) -> int:
        return 2

    def state_features(self, states: Array) -> Array:
        angles = np.asarray(states, dtype=np.float64).reshape(-1)
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)

    def sample_goal(self, rng: np.random.Generator) -> Array:
        return np.array([rng.uniform(-np.pi, np.pi)])

    def goal_in_range(self, goal: Array) -> bool:
        return bool(np.all(np.isfinite(goal)) and -np.pi <= goal[0] < np.pi)

    def goal_distance(self, state: Array, goal: Array) -> float:
        return float(circular_distance(state[0], goal[0]))

    def _initial_state(self, rng: np.random.Generator) -> Array:
        return np.array([rng.uniform(-np.pi, np.pi)])

    def _transition(self, state: Array, action: Array, rng: np.random.Generator) -> Array:
        return wrap_angle(state + ANGLE_STEP * action)
