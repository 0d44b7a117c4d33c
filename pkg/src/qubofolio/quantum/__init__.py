"""Statevector simulations of Grover adaptive search, QAOA and VQE."""

from .grover import GroverConfig, grover_adaptive_search, grover_search, optimal_rounds, success_probability
from .statevector import MAX_QUBITS, StateVector
from .variational import VariationalConfig, energy_expectation, qaoa, vqe

__all__ = [
    "MAX_QUBITS",
    "GroverConfig",
    "StateVector",
    "VariationalConfig",
    "energy_expectation",
    "grover_adaptive_search",
    "grover_search",
    "optimal_rounds",
    "qaoa",
    "success_probability",
    "vqe",
]
