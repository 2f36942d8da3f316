"""Adaptive-moment (Adam) optimizer over ParamSets."""

from dataclasses import dataclass

import numpy as np

from src.contracts.errors import ConfigError
from src.numerics.params import ParamSet


@dataclass
class OptState:
    """First/second moment accumulators and step counter."""

    m: ParamSet
    v: ParamSet
    step: int = 0


def init_opt_state(params: ParamSet) -> OptState:
    return OptState(m=params.zeros_like(), v=params.zeros_like(), step=0)


def opt_step(
    params: ParamSet,
    grads: ParamSet,
    state: OptState,
    lr: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> tuple[ParamSet, OptState]:
    """
    One bias-corrected Adam update (gradient descent direction).

    Args:
        params: Current parameters.
        grads: Gradient of the loss to minimize.
        state: Optimizer state for ``params``.
        lr: Learning rate (> 0).
        betas: Moment decay rates in [0, 1).
        eps: Denominator guard.

    Returns:
        Tuple of (new params, new state). Inputs are not mutated.
    """
    if lr <= 0:
        raise ConfigError(f"lr must be positive, got {lr}")
    beta1, beta2 = betas
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ConfigError(f"betas must lie in [0, 1), got {betas}")
    if params.shapes() != grads.shapes() or params.shapes() != state.m.shapes():
        raise ConfigError("Optimizer shape mismatch")

    step = state.step + 1
    m = state.m.zip_map(grads, lambda m_, g: beta1 * m_ + (1.0 - beta1) * g)
    v = state.v.zip_map(grads, lambda v_, g: beta2 * v_ + (1.0 - beta2) * g * g)
    c1 = 1.0 - beta1**step
    c2 = 1.0 - beta2**step

    new_arrays = [
        p - lr * (m_ / c1) / (np.sqrt(v_ / c2) + eps)
        for p, m_, v_ in zip(params.arrays(), m.arrays(), v.arrays(), strict=True)
    ]
    new_params = params.with_arrays(new_arrays)
    return new_params, OptState(m=m, v=v, step=step)
