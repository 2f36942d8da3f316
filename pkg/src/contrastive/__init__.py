"""Encoders, MI estimators, critic objectives, and the Q interface."""

from src.contrastive.critic import (
    CriticInputs,
    CriticLoss,
    Featurizer,
    IdentityFeaturizer,
    anchor_features,
    critic_inputs,
    critic_occupancy,
    q_matrix,
    q_value,
    score_matrices,
)
from src.contrastive.encoders import EncoderSet, init_encoders
from src.contrastive.estimators import (
    binary_nce_grad,
    binary_nce_objective,
    club_estimate,
    club_grad,
    infonce_grad,
    infonce_mi_estimate,
    infonce_objective,
    row_softmax,
)
from src.contrastive.objectives import (
    CriticObjective,
    CriticScores,
    ScoreGrads,
    bo_estimate,
    bo_grad,
    crl_loss,
    crl_loss_grad,
    safe_loss,
    safe_loss_grad,
)

__all__ = [
    "CriticInputs",
    "CriticLoss",
    "CriticObjective",
    "CriticScores",
    "EncoderSet",
    "Featurizer",
    "IdentityFeaturizer",
    "ScoreGrads",
    "anchor_features",
    "binary_nce_grad",
    "binary_nce_objective",
    "bo_estimate",
    "bo_grad",
    "club_estimate",
    "club_grad",
    "critic_inputs",
    "critic_occupancy",
    "crl_loss",
    "crl_loss_grad",
    "infonce_grad",
    "infonce_mi_estimate",
    "infonce_objective",
    "init_encoders",
    "q_matrix",
    "q_value",
    "row_softmax",
    "safe_loss",
    "safe_loss_grad",
    "score_matrices",
]
