"""Pydantic schemas for experiment configuration."""

from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator


# =============================================================================
# Tags
# =============================================================================


class EnvName(str, Enum):
    """Environment tags accepted by the CLI."""

    POINT_REACH = "point_reach"
    POINT_REACH_WALL = "point_reach_wall"
    VALVE_TURN = "valve_turn"
    CHAIN = "chain"


class Method(str, Enum):
    """Critic objective families."""

    VISA = "visa"
    CRL_CPC = "crl_cpc"
    CRL_NCE = "crl_nce"
    ONLY_AUGMENT = "only_augment"

    @property
    def uses_augmentation(self) -> bool:
        return self in (Method.VISA, Method.ONLY_AUGMENT)


class AugTag(str, Enum):
    """Augmentation distributions p(s_a | s_v)."""

    NONE = "none"
    STRONG_UNBIAS = "strong_unbias"
    MIDDLE_UNBIAS = "middle_unbias"
    WEAK_UNBIAS = "weak_unbias"
    RANDOM_TIME = "random_time"
    RANDOM_GOAL = "random_goal"
    ONLY_AUGMENT = "only_augment"

    @property
    def future_only(self) -> bool:
        """Tags whose samples never precede the visited state."""
        return self in (
            AugTag.STRONG_UNBIAS,
            AugTag.MIDDLE_UNBIAS,
            AugTag.WEAK_UNBIAS,
            AugTag.ONLY_AUGMENT,
        )


class SafeConvention(str, Enum):
    """Sign convention for the unique-information estimate."""

    PROSE = "prose"
    LITERAL = "literal"


# =============================================================================
# Augmentation
# =============================================================================


class AugmentationSpec(BaseModel):
    """Augmentation tag plus its discount."""

    tag: AugTag = Field(default=AugTag.NONE, description="Augmentation distribution.")
    gamma_aug: float = Field(default=0.99, gt=0.0, lt=1.0, description="Discount of p(s_a|s_v).")
    middle_flatten_exponent: float = Field(
        default=0.25,
        gt=0.0,
        le=1.0,
        description="middle_unbias decays with gamma_aug ** exponent.",
    )

    model_config = {"frozen": True}


# =============================================================================
# Training
# =============================================================================


class TrainConfig(BaseModel):
    """Full description of one training run."""

    env: EnvName = Field(default=EnvName.POINT_REACH, description="Environment tag.")
    method: Method = Field(default=Method.VISA, description="Critic objective.")
    aug: AugTag = Field(default=AugTag.STRONG_UNBIAS, description="Augmentation tag.")

    gamma: float = Field(default=0.99, gt=0.0, lt=1.0, description="Visited-state discount.")
    gamma_aug: float | None = Field(
        default=None,
        gt=0.0,
        lt=1.0,
        description="Augmentation discount; defaults to gamma.",
    )
    middle_flatten_exponent: float = Field(default=0.25, gt=0.0, le=1.0)
    safe_convention: SafeConvention = Field(default=SafeConvention.PROSE)
    lambda_club: float = Field(default=1.0, ge=0.0, le=1.0)
    bo_detach_base: bool = Field(default=False)

    batch_size: int = Field(default=256, ge=2, description="Contrastive batch size B.")
    embed_dim: int = Field(default=16, ge=1, description="Embedding dimension E.")
    hidden_sizes: list[int] = Field(default_factory=lambda: [64, 64])
    hidden_activation: Literal["relu", "tanh"] = Field(default="relu")
    lr_critic: float = Field(default=3e-4, gt=0.0)
    lr_actor: float = Field(default=3e-4, gt=0.0)
    adam_beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    alpha: float = Field(default=0.05, ge=0.0, description="Entropy coefficient.")

    total_env_steps: int = Field(default=200_000, ge=1)
    updates_per_step: int = Field(default=1, ge=0)
    eval_every: int = Field(default=5_000, ge=1)
    eval_episodes: int = Field(default=50, ge=1)
    buffer_capacity: int = Field(default=1_000, ge=2, description="Capacity in episodes.")
    warmup_steps: int = Field(default=2_000, ge=0)
    seed: int = Field(default=0, ge=0)

    critic_only: bool = Field(default=False, description="Freeze the actor; uniform actions.")
    episode_len: int | None = Field(default=None, ge=2, description="Override env horizon.")
    chain_states: int = Field(default=5, ge=2)
    chain_p_forward: float = Field(default=0.7, gt=0.0, le=1.0)
    match_sample_count: bool = Field(
        default=False,
        description="Double visited draws for non-augmented methods.",
    )
    coverage_samples: int = Field(default=4_096, ge=0)

    @field_validator("hidden_sizes", mode="before")
    @classmethod
    def split_hidden_sizes(cls, v: Any) -> Any:
        """Accept comma-separated strings from key/value files."""
        if isinstance(v, str):
            return [int(part) for part in v.replace(" ", "").split(",") if part]
        return v

    @field_validator("hidden_sizes")
    @classmethod
    def positive_hidden_sizes(cls, v: list[int]) -> list[int]:
        if not v or any(size < 1 for size in v):
            raise ValueError("hidden_sizes must be a non-empty list of positive integers")
        return v

    @model_validator(mode="after")
    def check_compatibility(self) -> "TrainConfig":
        """Enforce method/aug compatibility and chain restrictions."""
        if self.method.uses_augmentation and self.aug == AugTag.NONE:
            raise ValueError(f"method={self.method.value} requires an augmentation tag")
        if not self.method.uses_augmentation and self.aug != AugTag.NONE:
            raise ValueError(f"method={self.method.value} requires aug=none")
        if self.env == EnvName.CHAIN and not self.critic_only:
            raise ValueError("env=chain supports critic_only training only")
        return self

    @property
    def effective_gamma_aug(self) -> float:
        return self.gamma if self.gamma_aug is None else self.gamma_aug

    @property
    def effective_batch_size(self) -> int:
        """Batch rows actually drawn per critic update."""
        if self.match_sample_count and not self.method.uses_augmentation:
            return 2 * self.batch_size
        return self.batch_size

    @property
    def effective_coverage_samples(self) -> int:
        """Visited draws for the coverage report, doubled like the batch."""
        if self.match_sample_count and not self.method.uses_augmentation:
            return 2 * self.coverage_samples
        return self.coverage_samples

    def augmentation(self) -> AugmentationSpec:
        return AugmentationSpec(
            tag=self.aug,
            gamma_aug=self.effective_gamma_aug,
            middle_flatten_exponent=self.middle_flatten_exponent,
        )
