"""Command-line interface.

    socmig run --preset fig5a --out runs/fig5a
    socmig run --config my.json --seed 7 --replicates 20 --workers 4
    socmig list-presets
    socmig check-theorem1 --phi 0.5 --sigma 0.4 --d 1
    socmig check-theorem2 --n 21 --delta 0.3
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, get_preset, list_presets, load_config, with_overrides
from .artifacts import resolve_out_dir, write_run
from .opinions import OpinionParams
from .theorems import (
    ConsensusNotReachedError,
    TheoremScopeError,
    check_theorem1,
    check_theorem2,
)


def _add_run_parser(sub) -> None:
    p = sub.add_parser("run", help="simulate a scenario and write its artifacts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON config file")
    src.add_argument("--preset", help="name of a built-in scenario preset")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--replicates", type=int, help="override the replicate count")
    p.add_argument("--workers", type=int, default=1, help="replicate worker processes")
    p.add_argument(
        "--assignments", action="store_true", help="also write assignments.csv"
    )


def _add_theorem1_parser(sub) -> None:
    p = sub.add_parser(
        "check-theorem1", help="Monte Carlo check of the consensus contraction bound"
    )
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slack", type=float, default=1.05)
    p.add_argument(
        "--force", action="store_true", help="run even when phi + sigma >= 1"
    )
    p.add_argument("--json", dest="json_out", help="also write the report as JSON")


def _add_theorem2_parser(sub) -> None:
    p = sub.add_parser(
        "check-theorem2", help="Monte Carlo check of the star-leader expectation"
    )
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--migration-steps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_out", help="also write the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socmig",
        description="opinion + community-migration simulator on social graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    sub.add_parser("list-presets", help="print the scenario preset catalog")
    _add_theorem1_parser(sub)
    _add_theorem2_parser(sub)
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config) if args.config else get_preset(args.preset)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.assignments:
        overrides["write_assignments"] = True
    if overrides:
        config = with_overrides(config, **overrides)
    out = resolve_out_dir(config, args.out)
    report = write_run(config, out, workers=args.workers)
    ct = report["consensus_time"]
    print(f"wrote {out} (consensus_time={ct}, replicates={config.replicates})")
    return 0


def _cmd_list_presets() -> int:
    print(f"{'name':8} {'n':>4} {'d':>5} {'phi':>5} {'sigma':>6} {'delta':>6} {'T':>4}")
    for name, cfg in sorted(list_presets().items()):
        print(
            f"{name:8} {cfg.graph.n:>4} {cfg.opinion.d:>5} {cfg.opinion.phi:>5} "
            f"{cfg.opinion.sigma:>6} {cfg.migration.delta:>6} {cfg.horizon:>4}"
        )
    return 0


def _cmd_theorem1(args) -> int:
    params = OpinionParams(d=args.d, phi=args.phi, sigma=args.sigma)
    report = check_theorem1(
        params,
        n=args.n,
        replicates=args.replicates,
        horizon=args.horizon,
        seed=args.seed,
        slack=args.slack,
        force=args.force,
    )
    print(report.summary())
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.all_passed else 1


def _cmd_theorem2(args) -> int:
    report = check_theorem2(
        n=args.n,
        delta=args.delta,
        replicates=args.replicates,
        migration_steps=args.migration_steps,
        seed=args.seed,
    )
    print(report.summary())
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list-presets":
            return _cmd_list_presets()
        if args.command == "check-theorem1":
            return _cmd_theorem1(args)
        if args.command == "check-theorem2":
            return _cmd_theorem2(args)
    except (ConfigError, TheoremScopeError, ConsensusNotReachedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
