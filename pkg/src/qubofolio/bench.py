"""Experiment plans: solver matrices with repeats, derived seeds and best-of-N reports.

A plan file is JSON::

    {
      "instance": "testing",
      "seed": 0,
      "solvers": [
        {"name": "sa", "repeats": 10, "config": {"boltzmann_constant": 0.001}},
        {"name": "sa-slow", "algorithm": "sa", "config": {"temperature_decrement": 0.001}}
      ]
    }

``instance`` is a bundled name or a path to a spec JSON or QUBO problem file.
Run ``r`` of every solver uses seed ``seed + r``; the minimum-objective run
is reported.  Wall times cover solver execution only.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import PlanError, QuboError
from .portfolio import INSTANCES, PortfolioSpec, build_qubo, decode_weights, feasibility_report, load_instance, load_spec
from .qubo import QuboProblem, brute_force, evaluate, load_problem
from .quantum.grover import GroverConfig, grover_adaptive_search
from .quantum.variational import VariationalConfig, qaoa, vqe
from .solvers.annealing import AnnealConfig, simulated_annealing
from .solvers.bnb import BnbConfig, branch_and_bound
from .solvers.genetic import GeneticConfig, genetic_optimize
from .solvers.gradient import GradientConfig, projected_gradient

THREADS_ENV = "QUBOFOLIO_THREADS"
REPORT_FILES = {"json": "report.json", "csv": "report.csv", "markdown": "report.md"}


@dataclass(frozen=True)
class _BruteConfig:
    seed: int = 0


@dataclass(frozen=True)
class SolverSpec:
    """Registry entry: config type, entry point, default repeats, input kind."""

    config_type: type
    run: Callable
    repeats: int
    continuous: bool = False


def _brute(problem, config):
    return brute_force(problem)


SOLVERS: dict[str, SolverSpec] = {
    "brute": SolverSpec(_BruteConfig, _brute, 1),
    "bnb": SolverSpec(BnbConfig, branch_and_bound, 1),
    "gradient": SolverSpec(GradientConfig, projected_gradient, 1, continuous=True),
    "sa": SolverSpec(AnnealConfig, simulated_annealing, 10),
    "ga": SolverSpec(GeneticConfig, genetic_optimize, 10),
    "gas": SolverSpec(GroverConfig, grover_adaptive_search, 100),
    "qaoa": SolverSpec(VariationalConfig, qaoa, 10),
    "vqe": SolverSpec(VariationalConfig, vqe, 10),
}


def make_config(algorithm: str, options: dict | None, seed: int):
    """Instantiate the config dataclass of ``algorithm`` with ``seed`` applied."""
    if algorithm not in SOLVERS:
        raise PlanError(f"unknown solver {algorithm!r}; expected one of {sorted(SOLVERS)}")
    options = dict(options or {})
    options.pop("algorithm", None)
    options["seed"] = seed
    ctype = SOLVERS[algorithm].config_type
    known = {f.name for f in dataclasses.fields(ctype)}
    extra = set(options) - known
    if extra:
        raise PlanError(f"{algorithm}: unknown config keys {sorted(extra)}")
    if algorithm == "bnb" and isinstance(options.get("incumbent"), dict):
        options["incumbent"] = AnnealConfig(**options["incumbent"])
    try:
        return ctype(**options)
    except (TypeError, QuboError) as exc:
        raise PlanError(f"{algorithm}: {exc}") from None


# -- plans ------------------------------------------------------------------


@dataclass(frozen=True)
class SolverEntry:
    name: str
    algorithm: str
    repeats: int
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentPlan:
    instance: str
    solvers: tuple[SolverEntry, ...]
    seed: int = 0
    base_dir: str = "."

    @classmethod
    def from_dict(cls, d: dict, base_dir=".") -> "ExperimentPlan":
        if not isinstance(d, dict) or "instance" not in d:
            raise PlanError("plan needs an 'instance' key")
        entries = []
        for raw in d.get("solvers", []):
            if isinstance(raw, str):
                raw = {"name": raw}
            if "name" not in raw:
                raise PlanError("every solver entry needs a 'name'")
            algo = raw.get("algorithm", raw.get("config", {}).get("algorithm", raw["name"]))
            default = SOLVERS[algo].repeats if algo in SOLVERS else 1
            entries.append(SolverEntry(raw["name"], algo, int(raw.get("repeats", default)), dict(raw.get("config", {}))))
        return cls(str(d["instance"]), tuple(entries), int(d.get("seed", 0)), str(base_dir))

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise PlanError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(raw, base_dir=path.parent)

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "seed": self.seed,
            "solvers": [dataclasses.asdict(e) for e in self.solvers],
        }


@dataclass(frozen=True)
class Instance:
    name: str
    problem: QuboProblem
    spec: PortfolioSpec | None


def resolve_instance(name: str, base_dir=".") -> Instance:
    """Bundled instance, spec JSON or problem file."""
    if name in INSTANCES:
        spec = load_instance(name)
        return Instance(name, build_qubo(spec), spec)
    path = Path(name)
    if not path.is_absolute():
        path = Path(base_dir) / path
    if not path.exists():
        raise PlanError(f"instance {name!r} is neither bundled nor an existing file")
    if path.suffix == ".json":
        spec = load_spec(path)
        return Instance(path.stem, build_qubo(spec), spec)
    return Instance(path.stem, load_problem(path), None)


def validate_plan(plan: ExperimentPlan) -> Instance:
    """Check every entry and build the instance; nothing is run."""
    if not plan.solvers:
        raise PlanError("plan has no solvers")
    names = [e.name for e in plan.solvers]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise PlanError(f"duplicate solver names {dup}")
    try:
        inst = resolve_instance(plan.instance, plan.base_dir)
    except PlanError:
        raise
    except (QuboError, OSError, json.JSONDecodeError) as exc:
        raise PlanError(f"instance {plan.instance!r} cannot be built: {exc}") from None
    for e in plan.solvers:
        if e.repeats < 1:
            raise PlanError(f"{e.name}: repeats must be at least 1")
        make_config(e.algorithm, e.config, plan.seed)
        if SOLVERS[e.algorithm].continuous and inst.spec is None:
            raise PlanError(f"{e.name}: {e.algorithm} needs a portfolio spec, not a bare problem file")
    return inst


def thread_count(env=None) -> int:
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise PlanError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise PlanError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


# -- runs and reports -------------------------------------------------------


@dataclass
class RunRecord:
    seed: int
    objective: float
    wall_time: float
    evaluations: int
    bits: str | None
    weights: list | None


@dataclass
class ReportRow:
    solver: str
    algorithm: str
    instance: str
    objective: float
    weights: list | None
    feasibility_deviation: float | None
    mean_time: float
    min_time: float
    repeats: int
    best_seed: int
    bits: str | None
    objectives: list[float]


@dataclass
class Report:
    instance: str
    assets: list[str]
    periods: list[str]
    seed: int
    rows: list[ReportRow]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        rows = [ReportRow(**r) for r in d["rows"]]
        return cls(d["instance"], list(d["assets"]), list(d["periods"]), int(d["seed"]), rows)

    def row(self, solver: str) -> ReportRow:
        for r in self.rows:
            if r.solver == solver:
                return r
        raise KeyError(solver)


def _one_run(inst: Instance, entry: SolverEntry, seed: int) -> RunRecord:
    algo = SOLVERS[entry.algorithm]
    config = make_config(entry.algorithm, entry.config, seed)
    if algo.continuous:
        res = algo.run(inst.spec, config)
        return RunRecord(seed, float(res.objective), float(res.wall_time), int(res.iterations), None,
                         np.asarray(res.weights).tolist())
    res = algo.run(inst.problem, config)
    weights = decode_weights(res.bits, inst.spec).tolist() if inst.spec is not None else None
    return RunRecord(seed, float(res.objective), float(res.wall_time), int(res.evaluations),
                     "".join(str(int(b)) for b in res.bits), weights)


def run_entry(inst: Instance, entry: SolverEntry, seed: int, threads: int = 1) -> list[RunRecord]:
    seeds = [seed + r for r in range(entry.repeats)]
    if threads <= 1 or entry.repeats == 1:
        return [_one_run(inst, entry, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=min(threads, entry.repeats)) as pool:
        return list(pool.map(lambda s: _one_run(inst, entry, s), seeds))


def _summarize(inst: Instance, entry: SolverEntry, runs: list[RunRecord]) -> ReportRow:
    best = min(runs, key=lambda r: r.objective)  # first minimum on ties
    dev = None
    if best.weights is not None and inst.spec is not None:
        dev = max(abs(p.deviation) for p in feasibility_report(best.weights, inst.spec))
    times = [r.wall_time for r in runs]
    return ReportRow(
        solver=entry.name,
        algorithm=entry.algorithm,
        instance=inst.name,
        objective=best.objective,
        weights=best.weights,
        feasibility_deviation=dev,
        mean_time=float(np.mean(times)),
        min_time=float(np.min(times)),
        repeats=len(runs),
        best_seed=best.seed,
        bits=best.bits,
        objectives=[r.objective for r in runs],
    )


def run_plan(plan: ExperimentPlan, out_dir=None, threads: int | None = None, progress=None) -> Report:
    """Validate, execute and reduce ``plan``; optionally write report files to ``out_dir``."""
    inst = validate_plan(plan)
    threads = thread_count() if threads is None else threads
    rows = []
    for entry in plan.solvers:
        runs = run_entry(inst, entry, plan.seed, threads)
        rows.append(_summarize(inst, entry, runs))
        if progress is not None:
            progress(rows[-1])
    spec = inst.spec
    report = Report(
        instance=inst.name,
        assets=list(spec.asset_labels) if spec is not None else [],
        periods=list(spec.period_labels) if spec is not None else [],
        seed=plan.seed,
        rows=rows,
    )
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def check_report(report: Report, problem: QuboProblem) -> bool:
    """Every reported objective re-evaluates from its bits."""
    for r in report.rows:
        if r.bits is not None and evaluate(problem, [int(c) for c in r.bits]) != r.objective:
            return False
    return True


# -- rendering --------------------------------------------------------------


def _weight_columns(report: Report) -> list[str]:
    if len(report.periods) <= 1:
        return list(report.assets)
    return [f"{p}:{a}" for p in report.periods for a in report.assets]


def _fmt_time(t: float) -> str:
    return f"{t:.3g}"


def report_table(report: Report, fmt: str = "markdown") -> str:
    """Render as ``csv`` (full precision), ``markdown`` (weights in % with one decimal) or ``json``."""
    if not report.rows:
        raise QuboError("report has no rows")
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=1)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        wcols = _weight_columns(report)
        w.writerow(["solver", "algorithm", "instance", "objective", "feasibility_deviation",
                    "repeats", "mean_time", "min_time", "best_seed", "bits"] + wcols)
        for r in report.rows:
            flat = list(np.ravel(r.weights)) if r.weights is not None else [""] * len(wcols)
            dev = "" if r.feasibility_deviation is None else repr(r.feasibility_deviation)
            w.writerow([r.solver, r.algorithm, r.instance, repr(r.objective), dev, r.repeats,
                        repr(r.mean_time), repr(r.min_time), r.best_seed, r.bits or ""] + [repr(float(x)) if x != "" else "" for x in flat])
        return buf.getvalue()
    if fmt == "markdown":
        multi = len(report.periods) > 1
        head = ["Solver"] + (["Period"] if multi else []) + list(report.assets) + ["Objective", "Deviation", "Time [s]", "Runs"]
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for r in report.rows:
            W = r.weights if r.weights is not None else [[None] * len(report.assets)]
            for t, wrow in enumerate(W):
                cells = [r.solver if t == 0 else ""]
                if multi:
                    cells.append(report.periods[t])
                cells += ["" if x is None else f"{100 * x:.1f}" for x in wrow]
                if t == 0:
                    dev = "" if r.feasibility_deviation is None else f"{r.feasibility_deviation:.4f}"
                    cells += [f"{r.objective:.5f}", dev, _fmt_time(r.mean_time), str(r.repeats)]
                else:
                    cells += ["", "", "", ""]
                lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise QuboError(f"unknown format {fmt!r}; expected csv, markdown or json")


def write_report(report: Report, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for fmt, fname in REPORT_FILES.items():
        (out / fname).write_text(report_table(report, fmt), encoding="utf-8")
    return out


def read_report(path) -> Report:
    """Load ``report.json`` from a report directory or a direct file path."""
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_FILES["json"]
    try:
        return Report.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise QuboError(f"{path}: not a report ({exc!r})") from None


def result_summary(result, spec: PortfolioSpec | None = None) -> dict[str, Any]:
    """JSON-friendly summary of one :class:`SolveResult`."""
    out = {
        "solver": result.solver,
        "seed": result.seed,
        "objective": result.objective,
        "bits": "".join(str(int(b)) for b in result.bits),
        "evaluations": result.evaluations,
        "wall_time": result.wall_time,
    }
    for key in ("optimal", "nodes", "qubits"):
        if key in result.info:
            out[key] = result.info[key]
    if spec is not None:
        W = decode_weights(result.bits, spec)
        out["weights"] = W.tolist()
        out["weight_sums"] = [p.total for p in feasibility_report(W, spec)]
    return out
