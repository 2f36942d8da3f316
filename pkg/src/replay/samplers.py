"""Visited-state and augmented-state index samplers, plus the reachability score."""

from collections.abc import Sequence
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from src.contracts.errors import InputError
from src.contracts.schemas import AugmentationSpec, AugTag
from src.numerics import Array
from src.replay.buffer import Trajectory

IntArray = NDArray[np.int64]


# =============================================================================
# Offset weights
# =============================================================================


def geometric_weights(remaining: int, gamma: float) -> Array:
    """Unnormalized (1 - gamma) * gamma^(d-1) for d = 1..remaining."""
    d = np.arange(1, remaining + 1, dtype=np.float64)
    return (1.0 - gamma) * gamma ** (d - 1.0)


def strong_unbias_weights(remaining: int, gamma_aug: float) -> Array:
    """Unnormalized 1 - (1 - gamma) * gamma^(d-1); non-decreasing in d."""
    return 1.0 - geometric_weights(remaining, gamma_aug)


def visited_offset_pmf(remaining: int, gamma: float) -> Array:
    """Truncated geometric pmf of the visited-state offset over 1..remaining."""
    w = geometric_weights(remaining, gamma)
    return w / w.sum()


@lru_cache(maxsize=4096)
def _augmented_pmf_cached(
    remaining: int, tag: AugTag, gamma_aug: float, exponent: float
) -> tuple[float, ...]:
    if tag in (AugTag.STRONG_UNBIAS, AugTag.ONLY_AUGMENT):
        w = strong_unbias_weights(remaining, gamma_aug)
    elif tag == AugTag.WEAK_UNBIAS:
        w = geometric_weights(remaining, gamma_aug)
    elif tag == AugTag.MIDDLE_UNBIAS:
        w = geometric_weights(remaining, gamma_aug**exponent)
    else:
        raise InputError(f"{tag.value} has no offset pmf")
    return tuple((w / w.sum()).tolist())


def augmented_offset_pmf(remaining: int, spec: AugmentationSpec) -> Array:
    """Normalized pmf over offsets d = k - j in 1..remaining for future-only tags."""
    if remaining < 1:
        raise InputError("augmented offset pmf needs at least one future step")
    return np.array(
        _augmented_pmf_cached(remaining, spec.tag, spec.gamma_aug, spec.middle_flatten_exponent)
    )


# =============================================================================
# Samplers
# =============================================================================


def sample_visited_offsets(
    remaining: IntArray | int,
    gamma: float,
    rng: np.random.Generator,
) -> IntArray:
    """
    Draw truncated-geometric offsets by inverting the CDF.

    P(d) is proportional to (1 - gamma) * gamma^(d-1) on d = 1..remaining.
    """
    remaining_arr = np.atleast_1d(np.asarray(remaining, dtype=np.int64))
    if np.any(remaining_arr < 1):
        raise InputError("anchor has no future state")
    u = rng.random(remaining_arr.shape)
    mass = 1.0 - gamma ** remaining_arr.astype(np.float64)
    d = np.floor(np.log1p(-u * mass) / np.log(gamma)).astype(np.int64) + 1
    return np.clip(d, 1, remaining_arr)


def sample_augmented_offsets(
    remaining: IntArray | int,
    spec: AugmentationSpec,
    rng: np.random.Generator,
) -> IntArray:
    """
    Draw offsets d = k - j for future-only tags; rows with no future get d = 0.

    weak/middle are truncated geometrics and reuse the inverse-CDF draw.
    strong_unbias weights lie in [gamma_aug, 1), so a uniform proposal accepted
    with probability equal to the weight samples them exactly.
    """
    if not spec.tag.future_only:
        raise InputError(f"{spec.tag.value} is not a future-only augmentation")
    remaining_arr = np.atleast_1d(np.asarray(remaining, dtype=np.int64))
    offsets = np.zeros(remaining_arr.shape, dtype=np.int64)
    live = remaining_arr > 0
    if not np.any(live):
        return offsets

    if spec.tag == AugTag.WEAK_UNBIAS:
        offsets[live] = sample_visited_offsets(remaining_arr[live], spec.gamma_aug, rng)
        return offsets
    if spec.tag == AugTag.MIDDLE_UNBIAS:
        gamma_mid = spec.gamma_aug**spec.middle_flatten_exponent
        offsets[live] = sample_visited_offsets(remaining_arr[live], gamma_mid, rng)
        return offsets

    gamma = spec.gamma_aug
    pending = np.flatnonzero(live)
    while pending.size:
        proposal = rng.integers(1, remaining_arr[pending] + 1)
        weight = 1.0 - (1.0 - gamma) * gamma ** (proposal - 1.0)
        accepted = rng.random(pending.size) < weight
        offsets[pending[accepted]] = proposal[accepted]
        pending = pending[~accepted]
    return offsets


def sample_visited_index(T: int, t: int, gamma: float, rng: np.random.Generator) -> int:
    """
    Index j > t of the visited state for anchor index ``t``.

    Raises:
        InputError: If ``t`` is not in [0, T).
    """
    if not 0 <= t < T:
        raise InputError(f"anchor index {t} has no future state in an episode of length {T}")
    if not 0.0 < gamma < 1.0:
        raise InputError(f"gamma must lie in (0, 1), got {gamma}")
    return int(t + sample_visited_offsets(T - t, gamma, rng)[0])


def sample_augmented_index(
    T: int,
    visited_index: int,
    spec: AugmentationSpec,
    rng: np.random.Generator,
    buffer: Sequence[Trajectory] | None = None,
    source_index: int = 0,
) -> tuple[int, int]:
    """
    Draw the augmented state paired with visited index ``j``.

    Args:
        T: Episode length of the source trajectory.
        visited_index: Index j of the visited state (0 < j <= T).
        spec: Augmentation tag and discount.
        rng: Random generator.
        buffer: Trajectories to draw from (random_goal only).
        source_index: Position of the source trajectory in ``buffer``.

    Returns:
        Tuple of (trajectory position, state index k).
    """
    j = visited_index
    tag = spec.tag
    if tag == AugTag.NONE:
        raise InputError("augmentation tag 'none' has no augmented sampler")
    if not 0 < j <= T:
        raise InputError(f"visited index {j} outside (0, {T}]")

    if tag.future_only:
        return source_index, j + int(sample_augmented_offsets(T - j, spec, rng)[0])

    if tag == AugTag.RANDOM_TIME:
        r = int(rng.integers(0, T))
        return source_index, r if r < j else r + 1

    # random_goal
    if not buffer:
        raise InputError("random_goal needs a non-empty replay buffer")
    n = len(buffer)
    if n == 1:
        other = source_index
    else:
        other = int(rng.integers(0, n - 1))
        if other >= source_index:
            other += 1
    return other, int(rng.integers(0, buffer[other].horizon + 1))


def reachability_score(anchor_index: int, sampled_index: int, T: int, same_trajectory: bool = True) -> float:
    """
    N / T with N the number of steps from the anchor to the sampled state.

    Cross-trajectory samples count as N = T.
    """
    if T < 1:
        raise InputError("episode length must be positive")
    n = abs(sampled_index - anchor_index) if same_trajectory else T
    return min(n, T) / T


def reachability_scores(
    anchor_index: IntArray,
    sampled_index: IntArray,
    horizon: IntArray,
    same_trajectory: NDArray[np.bool_],
) -> Array:
    """Vectorized ``reachability_score``."""
    n = np.where(same_trajectory, np.abs(sampled_index - anchor_index), horizon)
    return np.minimum(n, horizon) / horizon
