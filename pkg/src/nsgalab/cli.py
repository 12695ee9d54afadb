"""Command line interface: single runs, experiment tables, lemma validation
and bound formulas.

Exit codes: 0 success, 1 invalid configuration, 2 monitor or validation
violation, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchmarks import BenchmarkId, BenchmarkTag
from .harness import (
    Algorithm,
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    MonitorViolation,
    experiment_matrix,
    run_single,
    write_run_csv,
)
from .lemma_lab import validate_lemma
from .metrics import theory_bounds
from .variation import VariationConfig, VariationScheme


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsgalab",
        description="Reference-point niching optimizer experiments and validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a single seeded run and write its CSV")
    run_p.add_argument("--benchmark", choices=[t.value for t in BenchmarkTag],
                       default="oneminmax")
    run_p.add_argument("--n", type=int, default=601)
    run_p.add_argument("--pop-size", type=int, default=76)
    run_p.add_argument("--ref-points", type=int, default=76)
    run_p.add_argument("--algorithm", choices=[a.value for a in Algorithm],
                       default="nsga3")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--generations", type=int, default=100_000,
                       help="hard generation cap")
    run_p.add_argument("--windows", default="1:100,3001:3100",
                       help="measurement windows, e.g. '1:100,3001:3100'")
    run_p.add_argument("--t-start-rule", choices=["coverage", "coverage+mei"],
                       default="coverage")
    run_p.add_argument("--mutation-rate", type=float, default=None)
    run_p.add_argument("--scheme", choices=[s.value for s in VariationScheme],
                       default=VariationScheme.FAIR_BITWISE.value)
    run_p.add_argument("--rho-positive", choices=["closest", "random"],
                       default="closest")
    run_p.add_argument("--no-monitors", action="store_true")
    run_p.add_argument("--out", default="out-run", help="output directory")

    exp_p = sub.add_parser("experiment", help="run an experiment table")
    exp_p.add_argument("--table", choices=["1", "2", "custom"], required=True)
    exp_p.add_argument("--n", type=int, default=None)
    exp_p.add_argument("--pop-size", type=int, action="append", default=None)
    exp_p.add_argument("--ref-points", type=int, action="append", default=None,
                       help="override the reference point settings")
    exp_p.add_argument("--benchmark", choices=[t.value for t in BenchmarkTag],
                       default=None, help="benchmark for custom tables")
    exp_p.add_argument("--algorithm", action="append", default=None,
                       choices=[a.value for a in Algorithm],
                       help="baseline algorithms to include")
    exp_p.add_argument("--seeds", type=int, nargs="+", default=None)
    exp_p.add_argument("--master-seed", type=int, default=DEFAULT_MASTER_SEED)
    exp_p.add_argument("--runs", type=int, default=20)
    exp_p.add_argument("--generations", type=int, default=100_000)
    exp_p.add_argument("--jobs", type=int, default=1)
    exp_p.add_argument("--no-monitors", action="store_true")
    exp_p.add_argument("--out", required=True)

    val_p = sub.add_parser("validate", help="validate one lemma empirically")
    val_p.add_argument("--lemma", type=int, required=True,
                       choices=[2, 4, 5, 6, 8, 9, 10])
    val_p.add_argument("--trials", type=int, default=None)
    val_p.add_argument("--seed", type=int, default=0)
    val_p.add_argument("--out", default=None, help="also write the JSON report here")

    bounds_p = sub.add_parser("bounds", help="print the theoretical bound formulas")
    bounds_p.add_argument("--n", type=int, required=True)
    bounds_p.add_argument("--pop-size", type=int, required=True)
    bounds_p.add_argument("--ref-points", type=int, required=True)
    return parser


def _parse_windows(text: str) -> tuple[tuple[int, int], ...]:
    windows = []
    for part in text.split(","):
        a, _, b = part.partition(":")
        windows.append((int(a), int(b)))
    return tuple(windows)


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        benchmark=BenchmarkId(BenchmarkTag(args.benchmark), args.n),
        N=args.pop_size,
        N_r=args.ref_points,
        algorithm=Algorithm(args.algorithm),
        seeds=(args.seed,),
        max_generations=args.generations,
        windows=_parse_windows(args.windows),
        t_start_rule=args.t_start_rule,
        variation=VariationConfig(mutation_rate=args.mutation_rate,
                                  scheme=VariationScheme(args.scheme)),
        rho_positive=args.rho_positive,
        monitors=not args.no_monitors,
    )
    record = run_single(cfg, args.seed)
    out = Path(args.out)
    path = out / "runs" / cfg.label / f"{args.seed}.csv"
    write_run_csv(record, path)
    print(json.dumps({
        "label": cfg.label,
        "seed": args.seed,
        "generations": int(record.generations[-1]),
        "t_start": record.t_start,
        "final_mei": int(record.mei[-1]),
        "csv": str(path),
    }))
    return 0


def _cmd_experiment(args) -> int:
    summary = experiment_matrix(
        args.table,
        args.out,
        master_seed=args.master_seed,
        seeds=args.seeds,
        runs=args.runs,
        n=args.n,
        pop_sizes=args.pop_size,
        ref_point_settings=args.ref_points,
        algorithms=args.algorithm,
        benchmark_tag=args.benchmark,
        max_generations=args.generations,
        monitors=not args.no_monitors,
        jobs=args.jobs,
    )
    print(json.dumps({"out": args.out, "groups": len(summary["groups"])}))
    return 0


def _cmd_validate(args) -> int:
    report = validate_lemma(args.lemma, args.trials, args.seed)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    return 0 if report["passed"] else 2


def _cmd_bounds(args) -> int:
    bounds = theory_bounds(args.n, args.pop_size, args.ref_points)
    print(json.dumps({
        "n": args.n,
        "N": args.pop_size,
        "N_r": args.ref_points,
        "mei_opt": bounds.mei_opt,
        "mei_upper": bounds.mei_upper,
        "runtime_exponent": bounds.runtime_exponent,
    }))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "experiment": _cmd_experiment,
        "validate": _cmd_validate,
        "bounds": _cmd_bounds,
    }
    try:
        return handlers[args.command](args)
    except MonitorViolation as exc:
        print(f"monitor violation: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
