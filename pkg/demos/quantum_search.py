"""
Grover search and Grover adaptive search
========================================

First the textbook amplitude amplification on three qubits, then the
adaptive minimum search on the toy portfolio: six index qubits plus a
six-bit value register and one ancilla.
"""

# %%
import math

import numpy as np

from qubofolio import brute_force, build_qubo, decode_weights, load_instance
from qubofolio.quantum import GroverConfig, grover_adaptive_search, grover_search, optimal_rounds

probs = grover_search(3, {0b011}, rounds=2)
print(f"P(|011>) after two rounds = {probs[0b011]:.7f}")
print(f"closed form sin^2(5 asin(1/sqrt 8)) = {math.sin(5 * math.asin(8 ** -0.5)) ** 2:.7f}")
print("optimal round count for N = 8:", optimal_rounds(8))

# %%
spec = load_instance("toy")
problem = build_qubo(spec)
target = brute_force(problem).bits

res = grover_adaptive_search(problem, GroverConfig(value_bits=6, seed=1))
print(f"{res.info['qubits']} qubits, {res.info['oracle_calls']} oracle calls")
for step, y in res.trace:
    print(f"  improvement at call {step:3d}: threshold {y:.6f}")
print("found optimum:", np.array_equal(res.bits, target),
      "weights %", np.round(100 * decode_weights(res.bits, spec)[0], 1))

# %%
hits = sum(np.array_equal(grover_adaptive_search(problem, GroverConfig(seed=s)).bits, target) for s in range(100))
print(f"{hits}/100 seeded runs reach the optimum")
