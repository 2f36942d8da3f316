"""Tests for the replay buffer, samplers, and contrastive batches."""

import numpy as np
import pytest

from src.contracts.errors import ConfigError, InputError
from src.contracts.schemas import AugmentationSpec, AugTag
from src.replay import (
    ReplayBuffer,
    Trajectory,
    augmented_offset_pmf,
    reachability_histogram,
    reachability_score,
    sample_augmented_index,
    sample_augmented_offsets,
    sample_batch,
    sample_visited_index,
    sample_visited_offsets,
    strong_unbias_weights,
    visited_offset_pmf,
)
from tests.conftest import make_trajectory


def _empirical_pmf(offsets: np.ndarray, support: int) -> np.ndarray:
    return np.bincount(offsets, minlength=support + 1)[1:] / offsets.size


class TestReplayBuffer:
    """Tests for ReplayBuffer."""

    def test_append_to_empty(self) -> None:
        """Test that one append gives size 1."""
        buffer = ReplayBuffer(capacity=3)
        buffer.append(make_trajectory(5))
        assert len(buffer) == 1

    def test_ring_eviction(self) -> None:
        """Test that C + 1 appends evict the first episode."""
        buffer = ReplayBuffer(capacity=3)
        for _ in range(4):
            buffer.append(make_trajectory(5))
        assert len(buffer) == 3
        assert [ep.episode_id for ep in buffer] == [1, 2, 3]

    def test_episode_ids_increase(self) -> None:
        """Test that episode ids strictly increase."""
        buffer = ReplayBuffer(capacity=10)
        ids = [buffer.append(make_trajectory(3)).episode_id for _ in range(5)]
        assert ids == sorted(set(ids))
        assert buffer.inserted == 5

    def test_inconsistent_lengths(self) -> None:
        """Test that T+1 states are required for T actions."""
        with pytest.raises(InputError):
            Trajectory(states=np.zeros((5, 2)), actions=np.zeros((5, 2)), exploration_goal=np.zeros(2))

    def test_non_finite_states(self) -> None:
        """Test that NaN states are rejected."""
        states = np.zeros((4, 2))
        states[2, 1] = np.nan
        with pytest.raises(InputError):
            Trajectory(states=states, actions=np.zeros((3, 2)), exploration_goal=np.zeros(2))

    def test_capacity_must_be_positive(self) -> None:
        """Test the capacity precondition."""
        with pytest.raises(ConfigError):
            ReplayBuffer(capacity=0)


class TestVisitedSampler:
    """Tests for the truncated-geometric visited-state sampler."""

    def test_untruncated_formula(self) -> None:
        """Test P(1) = 0.01 and P(2) = 0.0099 at gamma = 0.99 with a long horizon."""
        pmf = visited_offset_pmf(10_000, 0.99)
        np.testing.assert_allclose(pmf[:2], [0.01, 0.0099], rtol=1e-6)

    def test_single_support_point(self, rng: np.random.Generator) -> None:
        """Test that T - t = 1 always gives j = t + 1."""
        assert all(sample_visited_index(10, 9, 0.99, rng) == 10 for _ in range(100))

    def test_empirical_pmf(self) -> None:
        """Test the empirical pmf against the normalized target at 10^6 draws."""
        rng = np.random.default_rng(0)
        offsets = sample_visited_offsets(np.full(1_000_000, 50), 0.9, rng)
        l1 = np.abs(_empirical_pmf(offsets, 50) - visited_offset_pmf(50, 0.9)).sum()
        assert l1 < 0.02

    def test_no_future_rejected(self, rng: np.random.Generator) -> None:
        """Test that t = T is an input error."""
        with pytest.raises(InputError):
            sample_visited_index(10, 10, 0.99, rng)

    def test_gamma_range(self, rng: np.random.Generator) -> None:
        """Test that gamma outside (0, 1) is rejected."""
        with pytest.raises(InputError):
            sample_visited_index(10, 0, 1.0, rng)


class TestAugmentedSampler:
    """Tests for the augmentation distributions."""

    def test_strong_unbias_arithmetic(self) -> None:
        """Test gamma_aug = 0.5 with two future steps: P(d = 2) = 0.6."""
        spec = AugmentationSpec(tag=AugTag.STRONG_UNBIAS, gamma_aug=0.5)
        np.testing.assert_allclose(strong_unbias_weights(2, 0.5), [0.5, 0.75])
        np.testing.assert_allclose(augmented_offset_pmf(2, spec), [0.4, 0.6])

    @pytest.mark.parametrize("gamma_aug", [0.1, 0.5, 0.9, 0.99, 0.9999])
    def test_strong_unbias_non_decreasing(self, gamma_aug: float) -> None:
        """Test that strong_unbias weights never decrease with the offset."""
        assert np.all(np.diff(strong_unbias_weights(200, gamma_aug)) >= 0)

    def test_strong_unbias_empirical_pmf(self) -> None:
        """Test the rejection sampler against the normalized weights at 10^6 draws."""
        rng = np.random.default_rng(1)
        spec = AugmentationSpec(tag=AugTag.STRONG_UNBIAS, gamma_aug=0.9)
        offsets = sample_augmented_offsets(np.full(1_000_000, 30), spec, rng)
        l1 = np.abs(_empirical_pmf(offsets, 30) - augmented_offset_pmf(30, spec)).sum()
        assert l1 < 0.02

    def test_middle_flattens_weak(self) -> None:
        """Test that middle_unbias puts more mass on far offsets than weak_unbias."""
        weak = augmented_offset_pmf(40, AugmentationSpec(tag=AugTag.WEAK_UNBIAS, gamma_aug=0.9))
        middle = augmented_offset_pmf(40, AugmentationSpec(tag=AugTag.MIDDLE_UNBIAS, gamma_aug=0.9))
        d = np.arange(1, 41)
        assert (middle * d).sum() > (weak * d).sum()

    @pytest.mark.parametrize(
        "tag", [AugTag.STRONG_UNBIAS, AugTag.MIDDLE_UNBIAS, AugTag.WEAK_UNBIAS, AugTag.ONLY_AUGMENT]
    )
    def test_future_only_support(self, tag: AugTag, rng: np.random.Generator) -> None:
        """Test that future-only tags never precede the visited state."""
        spec = AugmentationSpec(tag=tag, gamma_aug=0.95)
        for j in range(1, 20):
            _, k = sample_augmented_index(20, j, spec, rng)
            assert k > j

    def test_no_future_falls_back_to_self(self, rng: np.random.Generator) -> None:
        """Test that j = T gives k = j for future-only tags."""
        spec = AugmentationSpec(tag=AugTag.STRONG_UNBIAS, gamma_aug=0.9)
        assert sample_augmented_index(20, 20, spec, rng) == (0, 20)

    def test_random_time_uniform(self) -> None:
        """Test that random_time is uniform over every index except j."""
        rng = np.random.default_rng(2)
        spec = AugmentationSpec(tag=AugTag.RANDOM_TIME)
        draws = np.array([sample_augmented_index(49, 10, spec, rng)[1] for _ in range(100_000)])
        assert not np.any(draws == 10)
        freq = np.bincount(draws, minlength=50) / draws.size
        others = np.delete(freq, 10)
        sigma = np.sqrt((1 / 49) * (48 / 49) / draws.size)
        assert np.all(np.abs(others - 1 / 49) < 4 * sigma)

    def test_random_goal_other_trajectory(self, filled_buffer: ReplayBuffer, rng: np.random.Generator) -> None:
        """Test that random_goal never returns the source trajectory."""
        spec = AugmentationSpec(tag=AugTag.RANDOM_GOAL)
        episodes = filled_buffer.snapshot()
        for source in range(len(episodes)):
            for _ in range(50):
                other, k = sample_augmented_index(50, 5, spec, rng, episodes, source)
                assert other != source
                assert 0 <= k <= episodes[other].horizon

    def test_random_goal_needs_buffer(self, rng: np.random.Generator) -> None:
        """Test that random_goal with no buffer is an input error."""
        with pytest.raises(InputError):
            sample_augmented_index(50, 5, AugmentationSpec(tag=AugTag.RANDOM_GOAL), rng)

    def test_none_tag_rejected(self, rng: np.random.Generator) -> None:
        """Test that tag none has no augmented sampler."""
        with pytest.raises(InputError):
            sample_augmented_index(50, 5, AugmentationSpec(), rng)


class TestSampleBatch:
    """Tests for sample_batch."""

    def test_rows_satisfy_j_after_t(self, filled_buffer: ReplayBuffer, rng: np.random.Generator) -> None:
        """Test that every visited index follows its anchor."""
        batch = sample_batch(filled_buffer, 256, 0.99, AugmentationSpec(), rng)
        assert batch.size == 256
        assert np.all(batch.visited_j > batch.anchor_t)
        assert np.all(batch.visited_j <= batch.horizons)
        assert not batch.has_augmentation

    def test_states_match_indices(self, filled_buffer: ReplayBuffer, rng: np.random.Generator) -> None:
        """Test that row states are the stored states at the sampled indices."""
        spec = AugmentationSpec(tag=AugTag.STRONG_UNBIAS, gamma_aug=0.99)
        batch = sample_batch(filled_buffer, 64, 0.99, spec, rng)
        offset = 1000.0 * batch.traj_index
        np.testing.assert_array_equal(batch.states[:, 0], batch.anchor_t + offset)
        np.testing.assert_array_equal(batch.visited_states[:, 0], batch.visited_j + offset)
        assert batch.aug_k is not None and batch.aug_states is not None
        np.testing.assert_array_equal(batch.aug_states[:, 0], batch.aug_k + offset)
        assert np.all(batch.aug_k >= batch.visited_j)

    def test_in_batch_negatives(self) -> None:
        """Test that with two trajectories row 0's negatives come from the other one."""
        episodes = [make_trajectory(10), make_trajectory(10, offset=1000.0)]
        rng = np.random.default_rng(5)
        for _ in range(20):
            batch = sample_batch(episodes, 2, 0.9, AugmentationSpec(), rng)
            mask = batch.negative_mask
            if batch.traj_index[0] != batch.traj_index[1]:
                assert mask[0, 1] and mask[1, 0]
                assert batch.visited_states[1, 0] >= 1000.0 or batch.visited_states[0, 0] >= 1000.0
            else:
                assert not mask[0, 1]
            assert not mask[0, 0]

    def test_mean_offset_matches_truncated_geometric(self) -> None:
        """Test mean (j - t) against the analytic truncated-geometric mean."""
        episodes = [make_trajectory(50, offset=1000.0 * i) for i in range(4)]
        rng = np.random.default_rng(3)
        batch = sample_batch(episodes, 200_000, 0.99, AugmentationSpec(), rng)
        expected = np.mean(
            [(visited_offset_pmf(50 - t, 0.99) * np.arange(1, 51 - t)).sum() for t in range(50)]
        )
        assert abs(float(np.mean(batch.visited_j - batch.anchor_t)) - expected) < 0.1

    def test_same_seed_identical(self, filled_buffer: ReplayBuffer) -> None:
        """Test byte-identical batches for the same seed."""
        spec = AugmentationSpec(tag=AugTag.RANDOM_GOAL)
        a = sample_batch(filled_buffer, 32, 0.99, spec, np.random.default_rng(9))
        b = sample_batch(filled_buffer, 32, 0.99, spec, np.random.default_rng(9))
        assert a.states.tobytes() == b.states.tobytes()
        assert a.aug_states is not None and b.aug_states is not None
        assert a.aug_states.tobytes() == b.aug_states.tobytes()

    def test_random_goal_rows_cross_trajectories(self, filled_buffer: ReplayBuffer, rng: np.random.Generator) -> None:
        """Test that random_goal rows never draw from their own trajectory."""
        batch = sample_batch(filled_buffer, 128, 0.99, AugmentationSpec(tag=AugTag.RANDOM_GOAL), rng)
        assert batch.aug_traj_index is not None
        assert np.all(batch.aug_traj_index != batch.traj_index)
        np.testing.assert_array_equal(batch.augmented_reachability(), 1.0)

    def test_needs_two_trajectories(self, rng: np.random.Generator) -> None:
        """Test that a single trajectory is rejected."""
        with pytest.raises(InputError):
            sample_batch([make_trajectory(10)], 4, 0.99, AugmentationSpec(), rng)

    def test_batch_size_precondition(self, filled_buffer: ReplayBuffer, rng: np.random.Generator) -> None:
        """Test that B < 2 is rejected."""
        with pytest.raises(InputError):
            sample_batch(filled_buffer, 1, 0.99, AugmentationSpec(), rng)


class TestReachability:
    """Tests for the reachability score and coverage histograms."""

    @pytest.mark.parametrize("t,k,T,expected", [(0, 3, 10, 0.3), (4, 4, 10, 0.0), (0, 10, 10, 1.0)])
    def test_score(self, t: int, k: int, T: int, expected: float) -> None:
        """Test N / T on same-trajectory samples."""
        assert reachability_score(t, k, T) == pytest.approx(expected)

    def test_past_sample_uses_distance(self) -> None:
        """Test that k < t reports |k - t| / T."""
        assert reachability_score(7, 2, 10) == pytest.approx(0.5)

    def test_cross_trajectory_is_one(self) -> None:
        """Test that cross-trajectory samples score 1."""
        assert reachability_score(3, 4, 10, same_trajectory=False) == 1.0

    def test_histogram_sums_to_one(self, rng: np.random.Generator) -> None:
        """Test 10 bins with the last bin closed."""
        hist = reachability_histogram(np.concatenate([rng.random(999), [1.0]]))
        assert hist.shape == (10,)
        assert hist.sum() == pytest.approx(1.0)

    def test_strong_unbias_covers_more_than_visited(self, filled_buffer: ReplayBuffer) -> None:
        """Test that strong_unbias augmented samples reach further than visited samples."""
        rng = np.random.default_rng(4)
        spec = AugmentationSpec(tag=AugTag.STRONG_UNBIAS, gamma_aug=0.99)
        batch = sample_batch(filled_buffer, 20_000, 0.99, spec, rng)
        assert batch.augmented_reachability().mean() > batch.visited_reachability().mean()

    def test_middle_covers_more_than_weak(self, filled_buffer: ReplayBuffer) -> None:
        """Test that middle_unbias reaches further than weak_unbias."""
        means = {}
        for tag in (AugTag.MIDDLE_UNBIAS, AugTag.WEAK_UNBIAS):
            rng = np.random.default_rng(6)
            batch = sample_batch(filled_buffer, 20_000, 0.99, AugmentationSpec(tag=tag, gamma_aug=0.9), rng)
            means[tag] = batch.augmented_reachability().mean()
        assert means[AugTag.MIDDLE_UNBIAS] > means[AugTag.WEAK_UNBIAS]
