"""
Running an experiment plan
==========================

``bench_plan.json`` lists solvers with per-solver repeats and settings.
Every repeat gets a derived seed, so the report reproduces exactly.  The same
plan runs from the shell with ``qubofolio bench --plan demos/bench_plan.json``.
"""

# %%
from pathlib import Path

from qubofolio.bench import ExperimentPlan, report_table, run_plan

plan = ExperimentPlan.load(Path(__file__).with_name("bench_plan.json"))
report = run_plan(plan)
print(report_table(report, "markdown"))

# %%
for row in report.rows:
    print(f"{row.solver:8s} best seed {row.best_seed:3d}  mean time {1000 * row.mean_time:7.2f} ms")
