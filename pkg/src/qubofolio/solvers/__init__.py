"""Classical QUBO and continuous portfolio solvers."""

from .annealing import AnnealConfig, simulated_annealing
from .bnb import BnbConfig, branch_and_bound, subcube_lower_bound
from .genetic import GeneticConfig, genetic_optimize
from .gradient import GradientConfig, GradientResult, project_to_simplex, projected_gradient

__all__ = [
    "AnnealConfig",
    "BnbConfig",
    "GeneticConfig",
    "GradientConfig",
    "GradientResult",
    "branch_and_bound",
    "genetic_optimize",
    "project_to_simplex",
    "projected_gradient",
    "simulated_annealing",
    "subcube_lower_bound",
]
