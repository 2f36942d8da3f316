"""Minimal differentiable-function toolkit (MLPs, Adam, gradient checks)."""

from src.numerics.gradients import (
    DifferentiableLoss,
    ensure_finite,
    finite_diff_check,
    grad,
    value_and_grad,
)
from src.numerics.mlp import ForwardCache, mlp_backward, mlp_forward, mlp_forward_cached
from src.numerics.optim import OptState, init_opt_state, opt_step
from src.numerics.params import Activation, Array, Layer, ParamSet, init_param_set

__all__ = [
    "Activation",
    "Array",
    "DifferentiableLoss",
    "ForwardCache",
    "Layer",
    "OptState",
    "ParamSet",
    "ensure_finite",
    "finite_diff_check",
    "grad",
    "init_opt_state",
    "init_param_set",
    "mlp_backward",
    "mlp_forward",
    "mlp_forward_cached",
    "opt_step",
    "value_and_grad",
]
