"""
Classical solvers on the nine-asset instances
=============================================

The single-period *testing* instance (90 variables) and the three-period
*practical* instance (378 variables) are far beyond brute force.  Here the
projected-gradient baseline is compared with simulated annealing and the
genetic algorithm.  Takes about half a minute.
"""

# %%
import numpy as np

from qubofolio import build_qubo, continuous_objective, decode_weights, feasibility_report, load_instance
from qubofolio.solvers import AnnealConfig, GeneticConfig, genetic_optimize, projected_gradient, simulated_annealing

testing = load_instance("testing")
grad = projected_gradient(testing)
print(f"continuous optimum {grad.objective:.5f}")
print("weights %:", np.round(100 * grad.weights[0], 1))

# %%
# Best of a few annealing runs, scored on the decoded continuous weights.
problem = build_qubo(testing)
cfg = dict(boltzmann_constant=1e-3, temperature_decrement=1e-3, iterations_per_temperature=10_000)
runs = [simulated_annealing(problem, AnnealConfig(seed=s, **cfg)) for s in range(5)]
best = min(runs, key=lambda r: r.objective)
W = decode_weights(best.bits, testing)
print(f"annealing {continuous_objective(W, testing, include_penalty=False):.5f}, "
      f"budget deviation {feasibility_report(W, testing)[0].deviation:+.4f}")

# %%
# The dynamic problem: three consecutive periods with trading costs.
practical = load_instance("practical")
problem = build_qubo(practical)
print(f"practical instance: {problem.dim} variables")

sa = simulated_annealing(problem, AnnealConfig(boltzmann_constant=0.01, temperature_decrement=0.002,
                                               iterations_per_temperature=20_000))
ga = genetic_optimize(problem, GeneticConfig(seed=0))
for name, res in (("annealing", sa), ("genetic", ga)):
    W = decode_weights(res.bits, practical)
    sums = [round(p.total, 4) for p in feasibility_report(W, practical)]
    print(f"{name:9s} objective {continuous_objective(W, practical, include_penalty=False):.5f}  period sums {sums}")
