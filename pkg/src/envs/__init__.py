"""Goal-conditioned toy environments."""

from src.envs.base import GoalEnv, GoalEnvSpec, StepResult
from src.envs.chain import ChainMDP, chain_mdp_kernel
from src.envs.point_reach import PointReach2D, PointReachWall2D
from src.envs.registry import env_from_config, make_env, reset, sample_goal
from src.envs.valve_turn import ValveTurn1D

__all__ = [
    "ChainMDP",
    "GoalEnv",
    "GoalEnvSpec",
    "PointReach2D",
    "PointReachWall2D",
    "StepResult",
    "ValveTurn1D",
    "chain_mdp_kernel",
    "env_from_config",
    "make_env",
    "reset",
    "sample_goal",
]
