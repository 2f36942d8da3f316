"""Pytest configuration and fixtures."""

import os
from typing import Any

import numpy as np
import pytest

from src.config import get_settings
from src.contracts.schemas import TrainConfig
from src.replay import ReplayBuffer, Trajectory


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="Run long training acceptance checks",
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def setup_test_env() -> None:
    """Set up test environment variables."""
    os.environ.setdefault("VISA_LOG_LEVEL", "WARNING")
    os.environ.setdefault("VISA_MAX_WORKERS", "1")
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def make_trajectory(horizon: int, state_dim: int = 2, offset: float = 0.0) -> Trajectory:
    """Trajectory whose state at index t is (t + offset) in every coordinate."""
    states = np.repeat(np.arange(horizon + 1, dtype=np.float64)[:, None] + offset, state_dim, axis=1)
    actions = np.zeros((horizon, state_dim))
    return Trajectory(states=states, actions=actions, exploration_goal=states[-1].copy())


@pytest.fixture
def filled_buffer() -> ReplayBuffer:
    """Eight index-coded trajectories of length 50."""
    buffer = ReplayBuffer(capacity=16)
    for i in range(8):
        buffer.append(make_trajectory(50, offset=1000.0 * i))
    return buffer


def tiny_config(**overrides: Any) -> TrainConfig:
    """A run small enough for unit tests: 20 episodes of 10 steps on tiny networks."""
    values: dict[str, Any] = {
        "env": "point_reach",
        "method": "visa",
        "aug": "strong_unbias",
        "batch_size": 8,
        "embed_dim": 4,
        "hidden_sizes": [8],
        "episode_len": 10,
        "total_env_steps": 200,
        "eval_every": 100,
        "eval_episodes": 2,
        "buffer_capacity": 16,
        "warmup_steps": 50,
        "coverage_samples": 64,
        "seed": 3,
    }
    values.update(overrides)
    return TrainConfig.model_validate(values)
