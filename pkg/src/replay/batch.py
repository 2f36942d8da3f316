"""Contrastive batch assembly with in-batch negatives."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.contracts.errors import InputError
from src.contracts.schemas import AugmentationSpec, AugTag
from src.numerics import Array
from src.replay.buffer import ReplayBuffer, Trajectory
from src.replay.samplers import (
    IntArray,
    reachability_scores,
    sample_augmented_offsets,
    sample_visited_offsets,
)

logger = logging.getLogger(__name__)

REACHABILITY_BINS = 10


@dataclass(frozen=True)
class ContrastiveBatch:
    """
    Row-aligned anchors, visited states, and (optionally) augmented states.

    Row ``i`` is the positive pair for anchor ``i``; every other row ``j`` that
    comes from a different trajectory is one of its negatives.
    """

    traj_index: IntArray
    anchor_t: IntArray
    visited_j: IntArray
    horizons: IntArray
    states: Array
    actions: Array
    visited_states: Array
    goals: Array
    aug_traj_index: IntArray | None = None
    aug_k: IntArray | None = None
    aug_states: Array | None = None

    @property
    def size(self) -> int:
        return int(self.traj_index.shape[0])

    @property
    def has_augmentation(self) -> bool:
        return self.aug_states is not None

    @property
    def negative_mask(self) -> NDArray[np.bool_]:
        """``mask[i, j]`` is True when row ``j`` may serve as a negative for row ``i``."""
        mask = self.traj_index[:, None] != self.traj_index[None, :]
        return np.asarray(mask, dtype=np.bool_)

    def visited_reachability(self) -> Array:
        return reachability_scores(
            self.anchor_t,
            self.visited_j,
            self.horizons,
            np.ones(self.size, dtype=np.bool_),
        )

    def augmented_reachability(self) -> Array:
        if self.aug_k is None or self.aug_traj_index is None:
            raise InputError("batch carries no augmented states")
        return reachability_scores(
            self.anchor_t,
            self.aug_k,
            self.horizons,
            self.aug_traj_index == self.traj_index,
        )


def sample_batch(
    buffer: ReplayBuffer | Sequence[Trajectory],
    batch_size: int,
    gamma: float,
    spec: AugmentationSpec,
    rng: np.random.Generator,
) -> ContrastiveBatch:
    """
    Draw a contrastive batch from a read-only view of ``buffer``.

    Each row picks a trajectory uniformly (with replacement), an anchor index
    uniformly in {0, ..., T-1}, a visited index from the truncated geometric, and
    an augmented index when ``spec.tag`` is not none.

    Raises:
        InputError: Fewer than two trajectories or ``batch_size`` < 2.
    """
    episodes = buffer.snapshot() if isinstance(buffer, ReplayBuffer) else tuple(buffer)
    if len(episodes) < 2:
        raise InputError(f"sample_batch needs at least 2 trajectories, buffer holds {len(episodes)}")
    if batch_size < 2:
        raise InputError(f"batch size must be at least 2, got {batch_size}")
    if not 0.0 < gamma < 1.0:
        raise InputError(f"gamma must lie in (0, 1), got {gamma}")

    horizon_of = np.array([ep.horizon for ep in episodes], dtype=np.int64)
    traj = rng.integers(0, len(episodes), size=batch_size)
    horizons = horizon_of[traj]
    anchor_t = rng.integers(0, horizons)
    visited_j = anchor_t + sample_visited_offsets(horizons - anchor_t, gamma, rng)

    states = np.stack([episodes[i].states[t] for i, t in zip(traj, anchor_t, strict=True)])
    actions = np.stack([episodes[i].actions[t] for i, t in zip(traj, anchor_t, strict=True)])
    visited = np.stack([episodes[i].states[j] for i, j in zip(traj, visited_j, strict=True)])
    goals = np.stack([episodes[i].exploration_goal for i in traj])

    if spec.tag == AugTag.NONE:
        return ContrastiveBatch(
            traj_index=traj,
            anchor_t=anchor_t,
            visited_j=visited_j,
            horizons=horizons,
            states=states,
            actions=actions,
            visited_states=visited,
            goals=goals,
        )

    aug_traj, aug_k = _augmented_indices(episodes, traj, visited_j, horizons, spec, rng)
    aug_states = np.stack([episodes[i].states[k] for i, k in zip(aug_traj, aug_k, strict=True)])
    return ContrastiveBatch(
        traj_index=traj,
        anchor_t=anchor_t,
        visited_j=visited_j,
        horizons=horizons,
        states=states,
        actions=actions,
        visited_states=visited,
        goals=goals,
        aug_traj_index=aug_traj,
        aug_k=aug_k,
        aug_states=aug_states,
    )


def _augmented_indices(
    episodes: Sequence[Trajectory],
    traj: IntArray,
    visited_j: IntArray,
    horizons: IntArray,
    spec: AugmentationSpec,
    rng: np.random.Generator,
) -> tuple[IntArray, IntArray]:
    """Vectorized ``sample_augmented_index`` over batch rows."""
    if spec.tag.future_only:
        return traj.copy(), visited_j + sample_augmented_offsets(horizons - visited_j, spec, rng)

    if spec.tag == AugTag.RANDOM_TIME:
        r = rng.integers(0, horizons)
        return traj.copy(), np.where(r < visited_j, r, r + 1)

    # random_goal: uniform over the other trajectories, then a uniform index
    n = len(episodes)
    other = rng.integers(0, n - 1, size=traj.shape[0])
    other = np.where(other >= traj, other + 1, other)
    other_horizon = np.array([episodes[i].horizon for i in other], dtype=np.int64)
    return other, rng.integers(0, other_horizon + 1)


def reachability_histogram(scores: Array, bins: int = REACHABILITY_BINS) -> Array:
    """Fraction of scores per equal-width bin over [0, 1]; the last bin is closed."""
    counts, _ = np.histogram(np.asarray(scores, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    total = counts.sum()
    return counts / total if total else counts.astype(np.float64)
