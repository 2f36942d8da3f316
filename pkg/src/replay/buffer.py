"""Trajectory-indexed ring buffer."""

import logging
from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass, replace

import numpy as np

from src.contracts.errors import ConfigError, InputError
from src.numerics import Array

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trajectory:
    """One episode: T+1 states, T actions, and the goal it was collected toward."""

    states: Array
    actions: Array
    exploration_goal: Array
    episode_id: int = -1

    def __post_init__(self) -> None:
        if self.states.ndim != 2 or self.actions.ndim != 2:
            raise InputError("Trajectory states/actions must be 2-D arrays")
        if self.states.shape[0] != self.actions.shape[0] + 1:
            raise InputError(
                f"Trajectory has {self.states.shape[0]} states for "
                f"{self.actions.shape[0]} actions (expected T+1 states)"
            )
        if self.actions.shape[0] < 1:
            raise InputError("Trajectory needs at least one action")
        if not np.all(np.isfinite(self.states)):
            raise InputError("Trajectory states must be finite")

    @property
    def horizon(self) -> int:
        """Episode length T."""
        return int(self.actions.shape[0])


class ReplayBuffer:
    """
    Ring of trajectories; the oldest episode is evicted first.

    Single writer. Samplers work on ``snapshot()``.
    """

    def __init__(self, capacity: int) -> None:
        """
        Initialize buffer.

        Args:
            capacity: Maximum number of retained episodes.
        """
        if capacity < 1:
            raise ConfigError(f"capacity must be positive, got {capacity}")
        self._capacity = capacity
        self._episodes: deque[Trajectory] = deque(maxlen=capacity)
        self._inserted = 0

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def inserted(self) -> int:
        """Total number of episodes ever appended."""
        return self._inserted

    def __len__(self) -> int:
        return len(self._episodes)

    def __getitem__(self, index: int) -> Trajectory:
        return self._episodes[index]

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self._episodes)

    def append(self, trajectory: Trajectory) -> Trajectory:
        """
        Store ``trajectory`` with the next episode id.

        Returns:
            The stored trajectory (with its assigned episode_id).
        """
        stored = replace(trajectory, episode_id=self._inserted)
        if len(self._episodes) == self._capacity:
            logger.debug(f"Evicting episode {self._episodes[0].episode_id}")
        self._episodes.append(stored)
        self._inserted += 1
        return stored

    def snapshot(self) -> tuple[Trajectory, ...]:
        return tuple(self._episodes)
