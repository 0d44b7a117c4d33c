"""Command-line entry point ``qubofolio``.

Exit status is 0 on success, 2 when an input fails validation and 3 when a
run fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import (
    SOLVERS,
    ExperimentPlan,
    make_config,
    read_report,
    report_table,
    resolve_instance,
    result_summary,
    run_plan,
)
from .errors import QuboError
from .qubo import load_problem, save_problem

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ValidationFailure(Exception):
    pass


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationFailure(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{path}: invalid JSON ({exc})") from None


def _instance(name):
    try:
        return resolve_instance(name)
    except (QuboError, OSError) as exc:
        raise ValidationFailure(str(exc)) from None


def cmd_build(args) -> int:
    inst = _instance(args.instance)
    save_problem(inst.problem, args.out)
    print(f"wrote {inst.problem.dim}-variable problem to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    options = _read_json(args.config) if args.config else {}
    if args.problem is None and args.instance is None:
        raise ValidationFailure("give --problem or --instance")
    spec = None
    if args.instance is not None:
        inst = _instance(args.instance)
        problem, spec = inst.problem, inst.spec
    else:
        try:
            problem = load_problem(args.problem)
        except (QuboError, OSError) as exc:
            raise ValidationFailure(f"{args.problem}: {exc}") from None
    try:
        config = make_config(args.solver, options, args.seed)
    except QuboError as exc:
        raise ValidationFailure(str(exc)) from None
    entry = SOLVERS[args.solver]
    if entry.continuous:
        if spec is None:
            raise ValidationFailure(f"{args.solver} needs --instance with a portfolio spec")
        res = entry.run(spec, config)
        out = {"solver": args.solver, "seed": args.seed, "objective": res.objective,
               "objective_with_penalty": res.objective_with_penalty, "converged": res.converged,
               "weights": res.weights.tolist(), "wall_time": res.wall_time}
    else:
        out = result_summary(entry.run(problem, config), spec)
    text = json.dumps(out, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        plan = ExperimentPlan.load(args.plan)
    except OSError as exc:
        raise ValidationFailure(f"cannot read {args.plan}: {exc.strerror}") from None
    report = run_plan(plan, out_dir=args.out)
    print(report_table(report, "markdown"), end="")
    if args.out:
        print(f"report written to {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        report = read_report(args.input)
    except OSError as exc:
        raise ValidationFailure(f"cannot read report {args.input}: {exc.strerror}") from None
    print(report_table(report, args.format), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubofolio", description="Binary portfolio QUBO solvers and benchmarks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write the QUBO of an instance to a problem file")
    p.add_argument("--instance", required=True, help="toy, testing, practical or a spec JSON path")
    p.add_argument("--out", required=True, help="problem file to write")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="run one solver on a problem file or instance")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--problem", help="problem file")
    src.add_argument("--instance", help="instance name or spec JSON (enables weight decoding)")
    p.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    p.add_argument("--config", help="JSON file with solver settings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON result here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run an experiment plan")
    p.add_argument("--plan", required=True, help="plan JSON")
    p.add_argument("--out", help="directory for report.json, report.csv and report.md")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render a saved report")
    p.add_argument("--in", dest="input", required=True, help="report directory or report.json")
    p.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationFailure, QuboError) as exc:
        print(f"qubofolio: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"qubofolio: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
