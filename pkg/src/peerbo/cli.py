"""Command-line front end.

Subcommands:

- ``run``      one experiment; writes report.csv, events.csv, summary.txt
- ``compare``  several methods on one problem, aggregated over seeds
- ``prob``     success probability of plain random search on a box
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .bench import BENCHMARK_NAMES
from .harness import ExperimentConfig, METHODS


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--benchmark", choices=sorted(BENCHMARK_NAMES),
                        help="objective function (default ackley)")
    parser.add_argument("--dim", type=int, help="problem dimensionality")
    parser.add_argument("--workers", type=int, dest="n_workers",
                        help="size of the worker pool")
    parser.add_argument("--t-wall", type=float, dest="t_wall",
                        help="wall-clock budget in simulated seconds")
    parser.add_argument("--runner", choices=("sim", "realtime"),
                        help="deterministic simulation or real threads")
    parser.add_argument("--kappa", type=float,
                        help="UCB exploration weight (mean, for qUCB)")
    parser.add_argument("--n-candidates", type=int, dest="n_candidates",
                        help="acquisition pool size per ask")
    parser.add_argument("--n-tree", type=int, dest="n_tree",
                        help="trees in the forest surrogate")
    parser.add_argument("--duration-mean", type=float, dest="duration_mean",
                        help="mean emulated evaluation runtime")
    parser.add_argument("--duration-sd", type=float, dest="duration_sd",
                        help="emulated runtime standard deviation")
    parser.add_argument("--config", help="JSON file with config fields "
                        "(flags override it)")


def _config_from_args(args: argparse.Namespace,
                      method: str | None = None) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for name in ("benchmark", "dim", "n_workers", "t_wall", "runner",
                 "kappa", "n_candidates", "n_tree", "duration_mean",
                 "duration_sd", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if method is not None:
        overrides["method"] = method
    return replace(cfg, **overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, method=args.method)
    report = harness.run(cfg)
    out = report.save(args.out)
    print(report.summary_text(), end="")
    print(f"wrote {out / 'report.csv'}, events.csv, summary.txt")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    try:
        reports = [harness.load_report(d) for d in args.report_dirs]
    except FileNotFoundError as err:
        print(f"not a report directory: {err.filename}", file=sys.stderr)
        return 2
    table = harness.compare(reports, threshold=args.threshold)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        table.write_csv(out / "comparison.csv")
        with open(out / "comparison.txt", "w") as fh:
            fh.write(table.text())
    print(table.text(), end="")
    return 0


def _cmd_prob(args: argparse.Namespace) -> int:
    p = harness.random_search_success_probability(
        args.low, args.high, args.epsilon, args.dim, args.n
    )
    print(repr(p))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peerbo",
        description="Asynchronous distributed Bayesian optimization "
                    "experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--method", default="adbo-qucb",
                       choices=sorted(METHODS))
    p_run.add_argument("--seed", type=int, help="random seed")
    p_run.add_argument("--out", default="out", help="output directory")
    _add_run_options(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare",
                           help="tabulate saved report directories")
    p_cmp.add_argument("report_dirs", nargs="+",
                       help="directories written by `peerbo run`")
    p_cmp.add_argument("--threshold", type=float,
                       help="objective level for time-to-threshold")
    p_cmp.add_argument("--out",
                       help="also write comparison.csv/.txt here")
    p_cmp.set_defaults(func=_cmd_compare)

    p_prob = sub.add_parser(
        "prob", help="random-search success probability on a box"
    )
    p_prob.add_argument("--low", type=float, required=True)
    p_prob.add_argument("--high", type=float, required=True)
    p_prob.add_argument("--epsilon", type=float, required=True,
                        help="per-coordinate optimum tolerance")
    p_prob.add_argument("--dim", type=int, required=True)
    p_prob.add_argument("--n", type=int, required=True,
                        help="number of uniform draws")
    p_prob.set_defaults(func=_cmd_prob)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
