"""
QAOA and VQE on the toy portfolio
=================================

Both ansatz circuits are simulated exactly on six qubits.  The readout is
the most probable basis state of the optimized circuit, so a run "succeeds"
when that state is the brute-force optimum.
"""

# %%
import numpy as np

from qubofolio import brute_force, build_qubo, load_instance
from qubofolio.quantum import VariationalConfig, qaoa, vqe

problem = build_qubo(load_instance("toy"))
target = brute_force(problem).bits

# %%
for p in (1, 2, 3):
    res = [qaoa(problem, VariationalConfig(layers=p, seed=s)) for s in range(20)]
    hits = sum(np.array_equal(r.bits, target) for r in res)
    top = max(r.info["probability"] for r in res)
    print(f"QAOA p={p}: {hits}/20 seeds read out the optimum, best peak probability {top:.3f}")

# %%
res = [vqe(problem, VariationalConfig(layers=2, seed=s)) for s in range(20)]
print(f"VQE, 2 layers: {sum(np.array_equal(r.bits, target) for r in res)}/20 seeds")

# %%
# Coordinate descent is a drop-in alternative to the simplex optimizer.
cd = VariationalConfig(layers=3, optimizer="coordinate-descent", restarts=5)
r = qaoa(problem, cd)
print("QAOA p=3 with 5 coordinate-descent restarts:", np.array_equal(r.bits, target))
