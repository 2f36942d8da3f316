"""Replay storage, samplers, and contrastive batches."""

from src.replay.batch import ContrastiveBatch, reachability_histogram, sample_batch
from src.replay.buffer import ReplayBuffer, Trajectory
from src.replay.samplers import (
    augmented_offset_pmf,
    reachability_score,
    reachability_scores,
    sample_augmented_index,
    sample_augmented_offsets,
    sample_visited_index,
    sample_visited_offsets,
    strong_unbias_weights,
    visited_offset_pmf,
)

__all__ = [
    "ContrastiveBatch",
    "ReplayBuffer",
    "Trajectory",
    "augmented_offset_pmf",
    "reachability_histogram",
    "reachability_score",
    "reachability_scores",
    "sample_augmented_index",
    "sample_augmented_offsets",
    "sample_batch",
    "sample_visited_index",
    "sample_visited_offsets",
    "strong_unbias_weights",
    "visited_offset_pmf",
]
