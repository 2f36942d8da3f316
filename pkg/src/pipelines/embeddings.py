"""Raw embedding dumps for downstream projection."""

import logging
from pathlib import Path
from typing import Any

import numpy as np

from src.actor import greedy_action
from src.contracts.errors import InputError
from src.contracts.schemas import EnvName
from src.contrastive import anchor_features
from src.emit.checkpoint import Checkpoint
from src.emit.csv_sink import write_frame
from src.envs import GoalEnv
from src.numerics import mlp_forward
from src.pipelines.evaluation import load_for_env

logger = logging.getLogger(__name__)


def embedding_columns(embed_dim: int) -> list[str]:
    return (
        ["kind", "episode", "step"]
        + [f"psi_{i}" for i in range(embed_dim)]
        + [f"phi_goal_{i}" for i in range(embed_dim)]
        + ["q_value"]
    )


def embedding_rows(ckpt: Checkpoint, env: GoalEnv, n_rollouts: int, seed: int) -> list[dict[str, Any]]:
    """
    Greedy rollouts with psi(s_t, a_t) per step and phi(goal) per rollout.

    Each rollout yields T + 1 state rows (the last uses the greedy action at
    s_T) and one goal row whose psi columns are empty.
    """
    if n_rollouts < 1:
        raise InputError(f"n_rollouts must be at least 1, got {n_rollouts}")
    enc = ckpt.encoders
    e = enc.embed_dim
    rng = np.random.default_rng(seed)
    rows: list[dict[str, Any]] = []
    for episode in range(n_rollouts):
        goal = env.sample_goal(rng)
        state = env.reset(goal, seed=int(rng.integers(2**31)))
        goal_feat = env.state_features(goal)
        phi_goal = mlp_forward(enc.phi, goal_feat)[0]

        states, actions = [state], []
        for _ in range(env.spec.episode_len):
            action = greedy_action(ckpt.policy, env.state_features(state), goal_feat)[0]
            actions.append(action)
            state = env.step(state, action).next_state
            states.append(state)
        actions.append(greedy_action(ckpt.policy, env.state_features(state), goal_feat)[0])

        psi = mlp_forward(enc.psi, anchor_features(env, np.stack(states), np.stack(actions)))
        q = psi @ phi_goal
        for step in range(len(states)):
            row: dict[str, Any] = {"kind": "state", "episode": episode, "step": step}
            row.update({f"psi_{i}": float(psi[step, i]) for i in range(e)})
            row.update({f"phi_goal_{i}": float(phi_goal[i]) for i in range(e)})
            row["q_value"] = float(q[step])
            rows.append(row)
        goal_row: dict[str, Any] = {"kind": "goal", "episode": episode, "step": -1}
        goal_row.update({f"psi_{i}": np.nan for i in range(e)})
        goal_row.update({f"phi_goal_{i}": float(phi_goal[i]) for i in range(e)})
        goal_row["q_value"] = np.nan
        rows.append(goal_row)
    return rows


def dump_embeddings(
    checkpoint: str | Path,
    env_name: EnvName | str,
    n_rollouts: int,
    seed: int,
    out_path: str | Path,
    float_format: str = "%.10g",
) -> Path:
    """
    Write one row per (rollout, step) plus one goal row per rollout.

    Raises:
        CheckpointError: If the checkpoint was trained on a different env.
    """
    ckpt, env = load_for_env(checkpoint, env_name)
    rows = embedding_rows(ckpt, env, n_rollouts, seed)
    logger.info(f"Dumping {len(rows)} embedding rows to {out_path}")
    return write_frame(rows, out_path, embedding_columns(ckpt.embed_dim), float_format)
