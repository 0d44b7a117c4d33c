"""
The three-asset toy portfolio, end to end
=========================================

Three holdings (AUD, CAD, Gold) with three bits per weight.  The last weight
is implied by the budget, so the QUBO has only six variables and brute force
is instant.  Run with ``python3 demos/toy_walkthrough.py``.
"""

# %%
import numpy as np

from qubofolio import brute_force, build_qubo, decode_weights, load_instance, to_ising
from qubofolio.qubo import all_objectives
from qubofolio.solvers import branch_and_bound

spec = load_instance("toy")
problem = build_qubo(spec)
print(f"{problem.dim} binary variables, assets {spec.asset_labels}")

# %%
# Every one of the 64 bit strings, sorted by objective.
f = all_objectives(problem)
order = np.argsort(f, kind="stable")
for i in order[:5]:
    bits = [(i >> (problem.dim - 1 - k)) & 1 for k in range(problem.dim)]
    w = decode_weights(bits, spec)[0]
    print(f"{i:06b}  f = {f[i]: .6f}  weights = {np.round(100 * w, 1)}")

# %%
best = brute_force(problem)
print("brute force:", np.round(100 * decode_weights(best.bits, spec)[0], 1), "%")

bnb = branch_and_bound(problem)
print(f"branch and bound agrees: {np.array_equal(bnb.bits, best.bits)} "
      f"after {bnb.info['nodes']} nodes")

# %%
# The same landscape in spin variables z = 1 - 2x.
ising = to_ising(problem)
print("Ising fields h:", np.round(ising.fields, 4))
