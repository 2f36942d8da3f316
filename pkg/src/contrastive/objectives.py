"""
Critic objectives composed from the estimators.

All ``*_grad`` helpers return derivatives w.r.t. the two score summands
(S_v and the boost), from which the encoder gradients follow by the chain rule.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.contracts.errors import ConfigError, InputError
from src.contracts.schemas import Method, SafeConvention
from src.contrastive.estimators import (
    BoolMatrix,
    binary_nce_grad,
    club_grad,
    infonce_grad,
    infonce_objective,
)
from src.numerics import Array

CrlVariant = Literal["cpc", "nce", "only_augment"]


@dataclass(frozen=True)
class CriticScores:
    """S_v[i, j] = psi_i . phi_j and boost[i, j] = psi_i . phi_hat_j."""

    s_v: Array
    boost: Array | None = None

    @property
    def has_boost(self) -> bool:
        return self.boost is not None

    @property
    def s_full(self) -> Array:
        if self.boost is None:
            raise InputError("scores carry no augmented critic")
        return self.s_v + self.boost


@dataclass(frozen=True)
class ScoreGrads:
    """Loss value with derivatives w.r.t. S_v and the boost."""

    value: float
    d_s_v: Array
    d_boost: Array | None


# =============================================================================
# Boosted critic estimate
# =============================================================================


def bo_estimate(scores: CriticScores, negatives: BoolMatrix | None = None) -> float:
    """InfoNCE of the additive critic S_v + boost."""
    return infonce_objective(scores.s_full, negatives)


def bo_grad(
    scores: CriticScores,
    negatives: BoolMatrix | None = None,
    detach_base: bool = False,
) -> ScoreGrads:
    """
    Value and score gradients of ``bo_estimate``.

    With ``detach_base`` the value is unchanged but the base summand is trained
    on its own InfoNCE while the boost is trained against a frozen base:
    d/dS_v = grad InfoNCE(S_v), d/dboost = grad InfoNCE(sg(S_v) + boost).
    The returned gradients are then a staged update, not the gradient of ``value``.
    """
    value, g_full = infonce_grad(scores.s_full, negatives)
    if not detach_base:
        return ScoreGrads(value, g_full, g_full.copy())
    _, g_base = infonce_grad(scores.s_v, negatives)
    return ScoreGrads(value, g_base, g_full)


# =============================================================================
# Factorized objective
# =============================================================================


def safe_loss(
    scores: CriticScores,
    convention: SafeConvention | str = SafeConvention.PROSE,
    lambda_club: float = 1.0,
    negatives: BoolMatrix | None = None,
) -> float:
    """Loss to minimize; see ``safe_loss_grad``."""
    return safe_loss_grad(scores, convention, lambda_club, negatives).value


def safe_loss_grad(
    scores: CriticScores,
    convention: SafeConvention | str = SafeConvention.PROSE,
    lambda_club: float = 1.0,
    negatives: BoolMatrix | None = None,
    detach_base: bool = False,
) -> ScoreGrads:
    """
    Factorized estimate of D = J - U turned into a loss.

    prose:   L = -[bo + InfoNCE(S_v) - lambda * CLUB(S_full)]
    literal: L = -[bo - InfoNCE(S_v) + lambda * CLUB(S_full)]
    """
    try:
        convention = SafeConvention(convention)
    except ValueError as e:
        raise ConfigError(f"unknown safe convention: {convention}") from e
    if not 0.0 <= lambda_club <= 1.0:
        raise ConfigError(f"lambda_club must lie in [0, 1], got {lambda_club}")

    bo = bo_grad(scores, negatives, detach_base)
    nce_v, g_nce_v = infonce_grad(scores.s_v, negatives)
    club, g_club = club_grad(scores.s_full, negatives)
    assert bo.d_boost is not None

    sign = 1.0 if convention == SafeConvention.PROSE else -1.0
    objective = bo.value + sign * (nce_v - lambda_club * club)
    d_s_v = bo.d_s_v + sign * (g_nce_v - lambda_club * g_club)
    d_boost = bo.d_boost - sign * lambda_club * g_club
    return ScoreGrads(-objective, -d_s_v, -d_boost)


# =============================================================================
# CRL baselines
# =============================================================================


def crl_loss(
    scores: CriticScores,
    variant: CrlVariant,
    negatives: BoolMatrix | None = None,
) -> float:
    """cpc: -InfoNCE(S_v); nce: -BinaryNCE(S_v); only_augment: -bo."""
    return crl_loss_grad(scores, variant, negatives).value


def crl_loss_grad(
    scores: CriticScores,
    variant: CrlVariant,
    negatives: BoolMatrix | None = None,
    detach_base: bool = False,
) -> ScoreGrads:
    if variant == "cpc":
        value, g = infonce_grad(scores.s_v, negatives)
    elif variant == "nce":
        value, g = binary_nce_grad(scores.s_v, negatives)
    elif variant == "only_augment":
        if not scores.has_boost:
            raise InputError("only_augment needs the augmented critic scores")
        bo = bo_grad(scores, negatives, detach_base)
        assert bo.d_boost is not None
        return ScoreGrads(-bo.value, -bo.d_s_v, -bo.d_boost)
    else:
        raise ConfigError(f"unknown CRL variant: {variant}")
    d_boost = None if scores.boost is None else np.zeros_like(scores.boost)
    return ScoreGrads(-value, -g, d_boost)


# =============================================================================
# Method dispatch
# =============================================================================

_CRL_VARIANTS: dict[Method, CrlVariant] = {
    Method.CRL_CPC: "cpc",
    Method.CRL_NCE: "nce",
    Method.ONLY_AUGMENT: "only_augment",
}


@dataclass(frozen=True)
class CriticObjective:
    """Which loss a training run minimizes, with its knobs."""

    method: Method = Method.VISA
    convention: SafeConvention = SafeConvention.PROSE
    lambda_club: float = 1.0
    detach_base: bool = False

    @property
    def needs_augmentation(self) -> bool:
        return self.method.uses_augmentation

    def score_grads(self, scores: CriticScores, negatives: BoolMatrix | None = None) -> ScoreGrads:
        if self.method == Method.VISA:
            return safe_loss_grad(
                scores, self.convention, self.lambda_club, negatives, self.detach_base
            )
        return crl_loss_grad(scores, _CRL_VARIANTS[self.method], negatives, self.detach_base)
