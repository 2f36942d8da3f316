"""Ground-truth occupancy and mutual-information computations."""

from src.oracle.information import DiscreteJoint, discrete_mi, factorization_terms, gaussian_mi
from src.oracle.occupancy import (
    TabularMDP,
    discounted_occupancy,
    monte_carlo_occupancy,
    occupancy_table,
)

__all__ = [
    "DiscreteJoint",
    "TabularMDP",
    "discounted_occupancy",
    "discrete_mi",
    "factorization_terms",
    "gaussian_mi",
    "monte_carlo_occupancy",
    "occupancy_table",
]
