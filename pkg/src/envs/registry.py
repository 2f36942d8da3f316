"""Environment construction by tag."""

import numpy as np

from src.contracts.errors import ConfigError
from src.contracts.schemas import EnvName, TrainConfig
from src.envs.base import GoalEnv
from src.envs.chain import ChainMDP
from src.envs.point_reach import PointReach2D, PointReachWall2D
from src.envs.valve_turn import ValveTurn1D
from src.numerics import Array

ENV_CLASSES: dict[EnvName, type[GoalEnv]] = {
    EnvName.POINT_REACH: PointReach2D,
    EnvName.POINT_REACH_WALL: PointReachWall2D,
    EnvName.VALVE_TURN: ValveTurn1D,
    EnvName.CHAIN: ChainMDP,
}


def make_env(
    name: EnvName | str,
    episode_len: int | None = None,
    chain_states: int = 5,
    chain_p_forward: float = 0.7,
) -> GoalEnv:
    """
    Build an environment from its tag.

    Args:
        name: Environment tag.
        episode_len: Optional horizon override.
        chain_states: Number of chain states (chain only).
        chain_p_forward: Forward success probability (chain only).

    Raises:
        ConfigError: Unknown tag.
    """
    try:
        tag = EnvName(name)
    except ValueError as e:
        raise ConfigError(f"Unknown env tag: {name}") from e

    kwargs: dict[str, int] = {}
    if episode_len is not None:
        kwargs["episode_len"] = episode_len
    if tag == EnvName.CHAIN:
        return ChainMDP(n=chain_states, p_forward=chain_p_forward, **kwargs)
    return ENV_CLASSES[tag](**kwargs)


def env_from_config(config: TrainConfig) -> GoalEnv:
    return make_env(
        config.env,
        episode_len=config.episode_len,
        chain_states=config.chain_states,
        chain_p_forward=config.chain_p_forward,
    )


def reset(env_name: EnvName | str, goal: Array, seed: int) -> Array:
    """Initial state of a fresh ``env_name`` episode toward ``goal``."""
    return make_env(env_name).reset(goal, seed)


def sample_goal(env_name: EnvName | str, rng: np.random.Generator) -> Array:
    """Uniform goal from the goal space of ``env_name``."""
    return make_env(env_name).sample_goal(rng)
