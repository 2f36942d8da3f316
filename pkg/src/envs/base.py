"""Goal-conditioned environment interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError, InputError
from src.numerics import Array


@dataclass(frozen=True)
class GoalEnvSpec:
    """Static description of a goal-conditioned task."""

    state_dim: int
    action_dim: int
    goal_dim: int
    action_low: float
    action_high: float
    episode_len: int
    success_radius: float

    def __post_init__(self) -> None:
        if self.episode_len < 2:
            raise ConfigError("episode_len must be at least 2")
        if self.success_radius <= 0:
            raise ConfigError("success_radius must be positive")
        if self.goal_dim > self.state_dim:
            raise ConfigError("goal space must be a subset of the state space")


@dataclass(frozen=True)
class StepResult:
    """Outcome of one transition. No reward is exposed."""

    next_state: Array
    success: bool
    terminal: bool


class GoalEnv(ABC):
    """
    Base class for goal-conditioned MDPs.

    Goals live in the state space, so ``state_features`` also encodes goals.
    Each instance owns its random stream, seeded on ``reset``.
    """

    name: str = ""

    def __init__(self, spec: GoalEnvSpec) -> None:
        self._spec = spec
        self._goal: Array | None = None
        self._t = 0
        self._rng = np.random.default_rng(0)

    @property
    def spec(self) -> GoalEnvSpec:
        return self._spec

    @property
    def goal(self) -> Array:
        if self._goal is None:
            raise InputError(f"{self.name}: reset() must be called before use")
        return self._goal

    def reset(self, goal: Array, seed: int) -> Array:
        """
        Start an episode toward ``goal``.

        Args:
            goal: Goal inside the env's goal space.
            seed: Seed for the initial state and any transition noise.

        Returns:
            Initial state.
        """
        goal = np.asarray(goal, dtype=np.float64).reshape(self._spec.goal_dim)
        if not self.goal_in_range(goal):
            raise InputError(f"{self.name}: goal {goal.tolist()} outside goal space")
        self._goal = goal
        self._t = 0
        self._rng = np.random.default_rng(seed)
        return self._initial_state(self._rng)

    def step(self, state: Array, action: Array) -> StepResult:
        """Apply ``action`` (clamped to bounds) in ``state``."""
        action = np.asarray(action, dtype=np.float64).reshape(self._spec.action_dim)
        if not np.all(np.isfinite(action)):
            raise InputError(f"{self.name}: non-finite action {action.tolist()}")
        action = np.clip(action, self._spec.action_low, self._spec.action_high)
        next_state = self._transition(np.asarray(state, dtype=np.float64), action, self._rng)
        self._t += 1
        return StepResult(
            next_state=next_state,
            success=self.is_success(next_state, self.goal),
            terminal=self._t >= self._spec.episode_len,
        )

    def is_success(self, state: Array, goal: Array) -> bool:
        return bool(self.goal_distance(state, goal) <= self._spec.success_radius)

    def action_features(self, actions: Array) -> Array:
        """Encoder input for actions, shape (N, action_feature_dim)."""
        return np.atleast_2d(np.asarray(actions, dtype=np.float64))

    @property
    def action_feature_dim(self) -> int:
        return self._spec.action_dim

    @property
    def state_feature_dim(self) -> int:
        return self._spec.state_dim

    def state_features(self, states: Array) -> Array:
        """Encoder input for states or goals, shape (N, state_feature_dim)."""
        return np.atleast_2d(np.asarray(states, dtype=np.float64))

    @property
    def action_differentiable(self) -> bool:
        """Whether encoder action features are the raw (differentiable) actions."""
        return True

    @abstractmethod
    def sample_goal(self, rng: np.random.Generator) -> Array:
        """Draw a goal uniformly from the goal space."""
        ...

    @abstractmethod
    def goal_in_range(self, goal: Array) -> bool:
        ...

    @abstractmethod
    def goal_distance(self, state: Array, goal: Array) -> float:
        ...

    @abstractmethod
    def _initial_state(self, rng: np.random.Generator) -> Array:
        ...

    @abstractmethod
    def _transition(self, state: Array, action: Array, rng: np.random.Generator) -> Array:
        ...
