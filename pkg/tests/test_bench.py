from __future__ import annotations

import json

import numpy as np
import pytest

from qubofolio.bench import (
    ExperimentPlan,
    Report,
    check_report,
    read_report,
    report_table,
    resolve_instance,
    run_plan,
    thread_count,
    validate_plan,
)
from qubofolio.errors import PlanError
from qubofolio.portfolio import feasibility_report
from qubofolio.qubo import save_problem

TOY_PLAN = {
    "instance": "toy",
    "seed": 3,
    "solvers": [
        "brute",
        {"name": "sa", "repeats": 3, "config": {"boltzmann_constant": 0.01}},
        {"name": "ga", "repeats": 2},
        "bnb",
    ],
}


@pytest.fixture(scope="module")
def toy_report():
    return run_plan(ExperimentPlan.from_dict(TOY_PLAN), threads=1)


class TestValidation:
    def test_empty_solvers(self):
        with pytest.raises(PlanError):
            validate_plan(ExperimentPlan.from_dict({"instance": "toy", "solvers": []}))

    def test_unknown_solver(self):
        with pytest.raises(PlanError, match="unknown solver"):
            validate_plan(ExperimentPlan.from_dict({"instance": "toy", "solvers": ["tabu"]}))

    def test_duplicate_names(self):
        with pytest.raises(PlanError, match="duplicate"):
            validate_plan(ExperimentPlan.from_dict({"instance": "toy", "solvers": ["sa", "sa"]}))

    def test_unknown_config_key(self):
        plan = {"instance": "toy", "solvers": [{"name": "sa", "config": {"temperature": 3}}]}
        with pytest.raises(PlanError, match="unknown config keys"):
            validate_plan(ExperimentPlan.from_dict(plan))

    def test_invalid_config_value(self):
        plan = {"instance": "toy", "solvers": [{"name": "ga", "config": {"population_size": 1}}]}
        with pytest.raises(PlanError):
            validate_plan(ExperimentPlan.from_dict(plan))

    def test_missing_instance(self):
        with pytest.raises(PlanError):
            validate_plan(ExperimentPlan.from_dict({"instance": "nowhere.json", "solvers": ["sa"]}))

    def test_repeats(self):
        plan = {"instance": "toy", "solvers": [{"name": "sa", "repeats": 0}]}
        with pytest.raises(PlanError):
            validate_plan(ExperimentPlan.from_dict(plan))

    def test_gradient_needs_spec(self, toy_problem, tmp_path):
        save_problem(toy_problem, tmp_path / "toy.qubo")
        plan = {"instance": "toy.qubo", "solvers": ["gradient"]}
        with pytest.raises(PlanError):
            validate_plan(ExperimentPlan.from_dict(plan, base_dir=tmp_path))

    def test_thread_env(self):
        assert thread_count({}) == 1
        assert thread_count({"QUBOFOLIO_THREADS": "4"}) == 4
        with pytest.raises(PlanError):
            thread_count({"QUBOFOLIO_THREADS": "0"})
        with pytest.raises(PlanError):
            thread_count({"QUBOFOLIO_THREADS": "many"})

    def test_default_repeats(self):
        plan = ExperimentPlan.from_dict({"instance": "toy", "solvers": ["sa", "bnb", "gas"]})
        assert [e.repeats for e in plan.solvers] == [10, 1, 100]


class TestRun:
    def test_toy_weights_agree(self, toy_report):
        for row in toy_report.rows:
            assert row.weights == [[0.375, 0.5, 0.125]], row.solver

    def test_best_is_minimum(self, toy_report):
        for row in toy_report.rows:
            assert row.objective == min(row.objectives)
            assert len(row.objectives) == row.repeats

    def test_derived_seeds(self, toy_report):
        assert toy_report.row("sa").best_seed in (3, 4, 5)

    def test_objectives_re_evaluate(self, toy_report, toy_problem):
        assert check_report(toy_report, toy_problem)

    def test_feasibility_column(self, toy_report, toy_spec):
        for row in toy_report.rows:
            dev = max(abs(p.deviation) for p in feasibility_report(row.weights, toy_spec))
            assert row.feasibility_deviation == dev

    def test_reproducible(self, toy_report):
        again = run_plan(ExperimentPlan.from_dict(TOY_PLAN), threads=2)
        for a, b in zip(toy_report.rows, again.rows):
            assert (a.objective, a.bits, a.objectives, a.best_seed) == (b.objective, b.bits, b.objectives, b.best_seed)

    def test_continuous_row(self):
        rep = run_plan(ExperimentPlan.from_dict({"instance": "toy", "solvers": ["gradient"]}))
        row = rep.rows[0]
        assert row.bits is None
        assert np.allclose(np.array(row.weights) * 100, [[31.1, 54.7, 14.2]], atol=2.0)

    def test_problem_file_instance(self, toy_problem, tmp_path):
        save_problem(toy_problem, tmp_path / "toy.qubo")
        inst = resolve_instance("toy.qubo", tmp_path)
        assert inst.spec is None and inst.problem.dim == 6
        rep = run_plan(ExperimentPlan.from_dict({"instance": "toy.qubo", "solvers": ["brute"]}, base_dir=tmp_path))
        assert rep.rows[0].weights is None and rep.rows[0].bits == "011100"


class TestRendering:
    def test_json_round_trip(self, toy_report):
        assert Report.from_dict(json.loads(report_table(toy_report, "json"))) == toy_report

    def test_csv_one_row(self, toy_report):
        one = Report(toy_report.instance, toy_report.assets, toy_report.periods, 0, toy_report.rows[:1])
        lines = report_table(one, "csv").strip().splitlines()
        assert len(lines) == 2
        assert lines[0].split(",")[-3:] == ["AUD", "CAD", "Gold"]
        assert lines[1].split(",")[-3:] == ["0.375", "0.5", "0.125"]

    def test_markdown_percentages(self, toy_report):
        md = report_table(toy_report, "markdown")
        header = md.splitlines()[0]
        assert header.index("AUD") < header.index("CAD") < header.index("Gold")
        assert "| 37.5 | 50.0 | 12.5 |" in md

    def test_multi_period_markdown(self):
        rep = run_plan(ExperimentPlan.from_dict({"instance": "practical", "solvers": ["gradient"]}))
        md = report_table(rep, "markdown").splitlines()
        assert len(md) == 2 + 3
        assert "Period" in md[0]

    def test_files_written(self, toy_report, tmp_path):
        from qubofolio.bench import write_report

        write_report(toy_report, tmp_path / "out")
        assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["report.csv", "report.json", "report.md"]
        assert read_report(tmp_path / "out") == toy_report

    def test_empty_report(self):
        with pytest.raises(ValueError):
            report_table(Report("x", [], [], 0, []), "csv")
