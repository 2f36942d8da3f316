"""Policy evaluation and critic diagnostics."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.actor import PolicyParams, greedy_action
from src.contracts.errors import CheckpointError, InputError
from src.contracts.schemas import AugmentationSpec, EnvName
from src.contrastive import EncoderSet, anchor_features, critic_occupancy
from src.emit.checkpoint import Checkpoint, load_checkpoint
from src.envs import GoalEnv, make_env
from src.envs.chain import NUM_ACTIONS, ChainMDP
from src.numerics import Array
from src.oracle import TabularMDP, occupancy_table
from src.replay import ReplayBuffer, sample_batch
from src.utils.logging import latency_log

logger = logging.getLogger(__name__)


def evaluate_policy(
    env: GoalEnv,
    policy: PolicyParams,
    n_episodes: int,
    seed: int,
) -> float:
    """
    Fraction of greedy episodes whose final state is within the success radius.

    Each episode draws a fresh goal and initial state from ``seed``'s stream.
    """
    if n_episodes < 1:
        raise InputError(f"n_episodes must be at least 1, got {n_episodes}")
    rng = np.random.default_rng(seed)
    successes = 0
    for _ in range(n_episodes):
        goal = env.sample_goal(rng)
        state = env.reset(goal, seed=int(rng.integers(2**31)))
        goal_feat = env.state_features(goal)
        success = False
        for _ in range(env.spec.episode_len):
            action = greedy_action(policy, env.state_features(state), goal_feat)[0]
            result = env.step(state, action)
            state, success = result.next_state, result.success
        successes += int(success)
    return successes / n_episodes


def load_for_env(checkpoint: str | Path, env_name: EnvName | str) -> tuple[Checkpoint, GoalEnv]:
    """
    Load ``checkpoint`` with the environment it was trained on.

    The environment is rebuilt with the stored horizon and chain size.

    Raises:
        CheckpointError: If the checkpoint was trained on a different env.
    """
    env = make_env(env_name)
    ckpt = load_checkpoint(checkpoint, env.spec.action_low, env.spec.action_high)
    if ckpt.env != EnvName(env_name):
        raise CheckpointError(f"checkpoint was trained on {ckpt.env.value}, not {env_name}")
    env = make_env(env_name, episode_len=ckpt.episode_len, chain_states=ckpt.chain_states)
    return ckpt, env


def evaluate(checkpoint: str | Path, env_name: EnvName | str, n_episodes: int, seed: int) -> float:
    """
    Greedy success rate of a saved policy.

    Raises:
        CheckpointError: If the checkpoint was trained on a different env.
        InputError: If ``n_episodes`` < 1.
    """
    if n_episodes < 1:
        raise InputError(f"n_episodes must be at least 1, got {n_episodes}")
    ckpt, env = load_for_env(checkpoint, env_name)
    with latency_log(logger, f"Evaluate {n_episodes} episodes on {env.name}"):
        rate = evaluate_policy(env, ckpt.policy, n_episodes, seed)
    logger.info(f"Success rate {rate:.3f} over {n_episodes} episodes")
    return rate


# =============================================================================
# Chain critic diagnostic
# =============================================================================


@dataclass(frozen=True)
class ChainCriticReport:
    """Critic-implied vs exact occupancy for every (state, action) anchor."""

    critic: Array  # (n, A, n)
    exact: Array  # (n, A, n)
    tv: Array  # (n, A)
    critic_raw: Array  # (n, A, n), softmax of q alone
    tv_raw: Array  # (n, A)

    @property
    def max_tv(self) -> float:
        return float(self.tv.max())

    @property
    def max_tv_raw(self) -> float:
        return float(self.tv_raw.max())


def visited_state_marginal(
    buffer: ReplayBuffer,
    n_states: int,
    gamma: float,
    rng: np.random.Generator,
    draws: int = 20_000,
) -> Array:
    """Empirical distribution of visited states under the training sampler."""
    batch = sample_batch(buffer, draws, gamma, AugmentationSpec(), rng)
    idx = batch.visited_states.reshape(-1).astype(np.int64)
    counts = np.bincount(idx, minlength=n_states).astype(np.float64)
    return counts / counts.sum()


def chain_critic_report(
    enc: EncoderSet,
    env: ChainMDP,
    gamma: float,
    marginal: Array,
) -> ChainCriticReport:
    """
    Compare softmax_g(q(s, a, g) + log p(g)) with the exact occupancy under a
    uniform policy.

    The uncorrected softmax_g(q(s, a, g)) is reported next to it as ``tv_raw``.
    """
    n = env.n
    states = np.arange(n, dtype=np.float64).repeat(NUM_ACTIONS)
    # STAY is any non-positive action, FORWARD any positive one
    actions = np.tile(np.array([-0.5, 0.5]), n)
    anchors = anchor_features(env, states[:, None], actions[:, None])
    goals = env.state_features(np.arange(n, dtype=np.float64)[:, None])
    log_marginal = np.log(np.clip(marginal, 1e-12, None))
    critic = critic_occupancy(enc, anchors, goals, log_marginal).reshape(n, NUM_ACTIONS, n)
    critic_raw = critic_occupancy(enc, anchors, goals).reshape(n, NUM_ACTIONS, n)

    exact = occupancy_table(TabularMDP.uniform_policy(env.kernel, gamma))
    tv = 0.5 * np.abs(critic - exact).sum(axis=2)
    tv_raw = 0.5 * np.abs(critic_raw - exact).sum(axis=2)
    return ChainCriticReport(critic=critic, exact=exact, tv=tv, critic_raw=critic_raw, tv_raw=tv_raw)
