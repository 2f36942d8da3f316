"""Goal-conditioned policy and its Q-maximizing update."""

from src.actor.loss import ActorLoss, actor_loss
from src.actor.policy import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    PolicyParams,
    greedy_action,
    init_policy,
    policy_observation,
    policy_sample,
)

__all__ = [
    "LOG_STD_MAX",
    "LOG_STD_MIN",
    "ActorLoss",
    "PolicyParams",
    "actor_loss",
    "greedy_action",
    "init_policy",
    "policy_observation",
    "policy_sample",
]
