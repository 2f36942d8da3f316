"""Exact discrete mutual information and the Gaussian closed form. All values in nats."""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import rel_entr

from src.contracts.errors import ConfigError, InputError
from src.numerics import Array

MiTerm = Literal["I_xy", "I_x_yz", "I_xz_given_y"]


@dataclass(frozen=True)
class DiscreteJoint:
    """pmf[x, y, z] over finite alphabets."""

    pmf: Array

    def __post_init__(self) -> None:
        p = self.pmf
        if p.ndim != 3:
            raise InputError(f"joint pmf must have three axes, got shape {p.shape}")
        if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-12:
            raise InputError("joint pmf must be non-negative and sum to 1")

    @classmethod
    def random(cls, shape: tuple[int, int, int], rng: np.random.Generator) -> "DiscreteJoint":
        """Dirichlet(1) draw over the flattened alphabet."""
        flat = rng.dirichlet(np.ones(int(np.prod(shape))))
        pmf = flat.reshape(shape)
        return cls(pmf / pmf.sum())

    def marginal(self, axes: str) -> Array:
        """Marginal over the named axes, kept broadcastable to the full joint."""
        drop = tuple(i for i, name in enumerate("xyz") if name not in axes)
        return self.pmf.sum(axis=drop, keepdims=True)


def discrete_mi(joint: DiscreteJoint, which: MiTerm) -> float:
    """
    Plug-in MI by enumeration.

    I_xy = I(X; Y), I_x_yz = I(X; (Y, Z)), I_xz_given_y = I(X; Z | Y).
    Zero-probability cells contribute 0.
    """
    p = joint.pmf
    if which == "I_xy":
        p_xy = joint.marginal("xy")[:, :, 0]
        ref = joint.marginal("x")[:, :, 0] * joint.marginal("y")[:, :, 0]
        return float(rel_entr(p_xy, ref).sum())
    if which == "I_x_yz":
        return float(rel_entr(p, joint.marginal("x") * joint.marginal("yz")).sum())
    if which == "I_xz_given_y":
        p_y = joint.marginal("y")
        num = joint.marginal("xy") * joint.marginal("yz")
        ref = np.divide(num, p_y, out=np.zeros_like(num), where=p_y > 0)
        return float(rel_entr(p, ref).sum())
    raise ConfigError(f"unknown MI term: {which}")


def factorization_terms(joint: DiscreteJoint) -> tuple[float, float, float]:
    """(D, J, U) = (I(X;Y), I(X;(Y,Z)), I(X;Z|Y)); D = J - U holds exactly."""
    return (
        discrete_mi(joint, "I_xy"),
        discrete_mi(joint, "I_x_yz"),
        discrete_mi(joint, "I_xz_given_y"),
    )


def gaussian_mi(rho: float) -> float:
    """-0.5 * ln(1 - rho^2) for a bivariate normal with correlation rho."""
    if not -1.0 < rho < 1.0:
        raise InputError(f"|rho| must be < 1, got {rho}")
    return float(-0.5 * np.log1p(-(rho**2)))
