"""Gradient plumbing: the loss protocol, ``grad``, and finite-difference checks."""

import logging
from collections.abc import Sequence
from typing import Protocol

import numpy as np

from src.contracts.errors import ConfigError, NumericError
from src.numerics.params import Array, ParamSet

logger = logging.getLogger(__name__)


class DifferentiableLoss(Protocol):
    """A scalar loss of a list of ParamSets with a hand-derived backward pass."""

    def value(self, params: Sequence[ParamSet]) -> float:
        """Evaluate the loss."""
        ...

    def value_and_grad(self, params: Sequence[ParamSet]) -> tuple[float, list[ParamSet]]:
        """Evaluate the loss and its gradient w.r.t. every ParamSet."""
        ...


def ensure_finite(node: str, value: Array | float) -> None:
    """Raise NumericError naming ``node`` if ``value`` has a non-finite entry."""
    if not np.all(np.isfinite(value)):
        raise NumericError(node)


def value_and_grad(loss: DifferentiableLoss, params: Sequence[ParamSet]) -> tuple[float, list[ParamSet]]:
    """
    Loss value and gradient w.r.t. ``params``.

    Raises:
        NumericError: If the loss or any gradient entry is non-finite.
    """
    value, grads = loss.value_and_grad(params)
    ensure_finite("loss", value)
    for i, g in enumerate(grads):
        if not g.is_finite():
            raise NumericError(f"grad[{i}]")
    return value, grads


def grad(loss: DifferentiableLoss, params: Sequence[ParamSet]) -> list[ParamSet]:
    """Gradient of ``loss`` w.r.t. ``params``; see ``value_and_grad``."""
    return value_and_grad(loss, params)[1]


def finite_diff_check(
    loss: DifferentiableLoss,
    params: Sequence[ParamSet],
    eps: float = 1e-5,
    max_params: int = 10_000,
    seed: int = 0,
    floor: float = 1e-4,
) -> float:
    """
    Compare analytic gradients against central differences.

    Every scalar parameter is checked, or a seeded subsample of ``max_params``
    entries when the total is larger. The error per entry is
    ``|analytic - numeric| / max(|analytic|, |numeric|, floor)``.

    Args:
        loss: Loss to check.
        params: Point at which to check.
        eps: Central-difference step (> 0).
        max_params: Subsampling threshold.
        seed: Seed for the subsample.
        floor: Absolute floor of the relative-error denominator.

    Returns:
        Maximum relative error over the checked entries.
    """
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")

    work = [p.copy() for p in params]
    _, analytic = loss.value_and_grad(work)

    slots: list[tuple[Array, Array]] = []
    for p, g in zip(work, analytic, strict=True):
        for a, ga in zip(p.arrays(), g.arrays(), strict=True):
            slots.append((a.reshape(-1), ga.reshape(-1)))
    sizes = np.array([s[0].size for s in slots])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])

    if total > max_params:
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(total, size=max_params, replace=False))
    else:
        indices = np.arange(total)

    max_err = 0.0
    for flat in indices:
        slot = int(np.searchsorted(offsets, flat, side="right") - 1)
        values, g = slots[slot]
        k = int(flat - offsets[slot])
        original = values[k]
        values[k] = original + eps
        plus = loss.value(work)
        values[k] = original - eps
        minus = loss.value(work)
        values[k] = original
        numeric = (plus - minus) / (2.0 * eps)
        err = abs(g[k] - numeric) / max(abs(g[k]), abs(numeric), floor)
        max_err = max(max_err, float(err))

    logger.debug(f"Finite-difference check over {indices.size} entries: max_rel_error={max_err:.3e}")
    return max_err
