"""
Mutual-information estimators on a B x B score matrix.

Row ``i`` is anchor ``i``; the diagonal holds the positive pairs. Each
``*_grad`` function returns the value together with its derivative w.r.t. the
score matrix. ``negatives`` is an optional boolean mask; ``negatives[i, j]``
False drops column ``j`` from row ``i``'s negatives. The diagonal is always kept.
"""

import numpy as np
from numpy.typing import NDArray
from scipy.special import log_expit, logsumexp, softmax

from src.contracts.errors import InputError
from src.numerics import Array

BoolMatrix = NDArray[np.bool_]


def _check(scores: Array) -> Array:
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InputError(f"score matrix must be square, got shape {s.shape}")
    if s.shape[0] < 2:
        raise InputError("score matrix needs B >= 2")
    return s


def _allowed(b: int, negatives: BoolMatrix | None) -> BoolMatrix:
    """Columns entering each row's softmax: masked negatives plus the diagonal."""
    eye = np.eye(b, dtype=np.bool_)
    if negatives is None:
        return np.ones((b, b), dtype=np.bool_)
    return np.asarray(negatives, dtype=np.bool_) | eye


def _off_diagonal(b: int, negatives: BoolMatrix | None) -> BoolMatrix:
    return _allowed(b, negatives) & ~np.eye(b, dtype=np.bool_)


def row_softmax(scores: Array, negatives: BoolMatrix | None = None) -> Array:
    """Row-wise softmax over the allowed columns (zero elsewhere)."""
    s = _check(scores)
    logits = np.where(_allowed(s.shape[0], negatives), s, -np.inf)
    return softmax(logits, axis=1)


# =============================================================================
# InfoNCE
# =============================================================================


def infonce_objective(scores: Array, negatives: BoolMatrix | None = None) -> float:
    """Mean over rows of log softmax at the diagonal. Always <= 0."""
    s = _check(scores)
    logits = np.where(_allowed(s.shape[0], negatives), s, -np.inf)
    return float(np.mean(np.diag(s) - logsumexp(logits, axis=1)))


def infonce_grad(scores: Array, negatives: BoolMatrix | None = None) -> tuple[float, Array]:
    """InfoNCE value and d/dS = (I - softmax(S)) / B."""
    s = _check(scores)
    b = s.shape[0]
    p = row_softmax(s, negatives)
    return infonce_objective(s, negatives), (np.eye(b) - p) / b


def infonce_mi_estimate(scores: Array, negatives: BoolMatrix | None = None) -> float:
    """log B + InfoNCE; bounded above by log B."""
    s = _check(scores)
    return float(np.log(s.shape[0])) + infonce_objective(s, negatives)


# =============================================================================
# BinaryNCE
# =============================================================================


def binary_nce_objective(scores: Array, negatives: BoolMatrix | None = None) -> float:
    """Mean log sigma on positives plus mean log(1 - sigma) on off-diagonal pairs."""
    value, _ = binary_nce_grad(scores, negatives)
    return value


def binary_nce_grad(scores: Array, negatives: BoolMatrix | None = None) -> tuple[float, Array]:
    s = _check(scores)
    b = s.shape[0]
    off = _off_diagonal(b, negatives)
    n_off = int(off.sum())
    diag = np.diag(s)

    value = float(np.mean(log_expit(diag)))
    g = np.diag(np.exp(log_expit(-diag)) / b)
    if n_off:
        value += float(np.sum(log_expit(-s[off])) / n_off)
        g[off] -= np.exp(log_expit(s[off])) / n_off
    return value, g


# =============================================================================
# CLUB
# =============================================================================


def club_estimate(scores: Array, negatives: BoolMatrix | None = None) -> float:
    """Diagonal mean minus off-diagonal mean at the given critic."""
    value, _ = club_grad(scores, negatives)
    return value


def club_grad(scores: Array, negatives: BoolMatrix | None = None) -> tuple[float, Array]:
    s = _check(scores)
    b = s.shape[0]
    off = _off_diagonal(b, negatives)
    n_off = int(off.sum())
    value = float(np.mean(np.diag(s)))
    g = np.eye(b) / b
    if n_off:
        value -= float(s[off].sum() / n_off)
        g = g - off / n_off
    return value, g
