"""Output records written by training, ablation, and benchmark runs."""

from typing import Any

from pydantic import BaseModel, Field

METRICS_HEADER = (
    "env_step",
    "eval_success_rate",
    "critic_loss",
    "infonce_value",
    "club_value",
    "bo_value",
    "actor_loss",
    "policy_entropy",
    "mean_reach_visited",
    "mean_reach_augmented",
)


class MetricsRow(BaseModel):
    """One evaluation-interval record."""

    env_step: int = Field(..., ge=0)
    eval_success_rate: float = Field(..., ge=0.0, le=1.0)
    critic_loss: float = Field(default=0.0)
    infonce_value: float = Field(default=0.0)
    club_value: float = Field(default=0.0)
    bo_value: float = Field(default=0.0)
    actor_loss: float = Field(default=0.0)
    policy_entropy: float = Field(default=0.0)
    mean_reachability_visited: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        serialization_alias="mean_reach_visited",
    )
    mean_reachability_augmented: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        serialization_alias="mean_reach_augmented",
    )

    def to_csv_dict(self) -> dict[str, Any]:
        """Return a dict keyed by the exact metrics header."""
        return self.model_dump(by_alias=True)


class RunRecord(BaseModel):
    """Outcome of one (variant, seed) run inside an ablation."""

    variant: str
    method: str
    aug: str
    seed: int
    gamma: float
    final_success: float = Field(..., ge=0.0, le=1.0)
    mean_reach_visited: float = Field(default=0.0, ge=0.0, le=1.0)
    mean_reach_augmented: float = Field(default=0.0, ge=0.0, le=1.0)
    run_dir: str


class MiBenchRow(BaseModel):
    """Estimator values for one correlation coefficient."""

    rho: float = Field(..., gt=-1.0, lt=1.0)
    batch_size: int = Field(..., ge=2)
    steps: int = Field(..., ge=0)
    infonce_estimate: float
    club_estimate: float
    analytic_mi: float = Field(..., ge=0.0)
