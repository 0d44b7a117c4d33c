"""Dynamic Markowitz portfolio optimization as QUBO."""

from .qubo import (
    IsingModel,
    QuboProblem,
    SolveResult,
    brute_force,
    evaluate,
    from_ising,
    ising_energy,
    load_problem,
    save_problem,
    to_ising,
)
from .portfolio import (
    PortfolioSpec,
    WeightCodec,
    build_dynamic_qubo,
    build_qubo,
    build_toy_qubo,
    continuous_objective,
    decode_weights,
    feasibility_report,
    load_instance,
)

__version__ = "0.1.0"
