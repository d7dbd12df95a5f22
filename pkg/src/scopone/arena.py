"""`arena`: command-line front end for tournaments, sweeps and timing."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .cards import deal
from .experiments import (
    ExperimentPlan,
    measure_timing,
    run_match,
    run_plan,
    sweep,
    sweep_csv,
)
from .rng import mix64


def _cmd_run(args) -> int:
    plan = ExperimentPlan.from_file(args.plan)
    if args.out:
        plan = replace(plan, out_dir=args.out)
    table = run_plan(plan, progress=not args.quiet)
    print(table.summary_text())
    if args.out:
        print(f"results written to {args.out}/results.csv")
    return 0


def _cmd_sweep(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    plan = ExperimentPlan(
        pairings=(),
        deck_count=args.decks,
        deck_seed=args.deck_seed,
        repeats=args.repeats,
        seed=args.seed,
        parallelism=args.parallelism,
    )
    rows, _ = sweep(args.axis, values, args.variant, args.baseline, plan,
                    progress=not args.quiet)
    text = sweep_csv(rows)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"sweep_{args.axis}.csv").write_text(text)
        print(f"wrote {out / f'sweep_{args.axis}.csv'}")
    print(text)
    return 0


def _cmd_timing(args) -> int:
    iterations = [int(v) for v in args.iterations.split(",") if v.strip()]
    rows = measure_timing(args.strategy, iterations, samples=args.samples)
    header = f"{'iterations':>10} {'mean_ms':>12} {'median_ms':>12} {'stderr_ms':>12}"
    print(header)
    for row in rows:
        print(
            f"{row['iterations']:>10} {row['mean_ms']:>12.2f}"
            f" {row['median_ms']:>12.2f} {row['stderr_ms']:>12.3f}"
        )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        import csv as _csv

        with (out / "timing.csv").open("w") as fh:
            writer = _csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return 0


def _cmd_match(args) -> int:
    record = run_match(
        deal(args.deck_seed),
        args.hand,
        args.deck,
        mix64(args.seed),
        deal_seed=args.deck_seed,
    )
    sys.stdout.write(record.log_text)
    print(f"# totals hand={record.totals[0]} deck={record.totals[1]}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arena", description="Scopone tournament harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a tournament plan file")
    p_run.add_argument("--plan", required=True, help="plan file (.toml or .json)")
    p_run.add_argument("--out", help="output directory for csv/summary/logs")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one search knob vs a baseline")
    p_sweep.add_argument("--axis", required=True,
                         choices=["uct_c", "reward", "sim", "epsilon",
                                  "iterations", "determinizator"])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--variant", required=True,
                         help="strategy config the axis is applied to")
    p_sweep.add_argument("--baseline", required=True,
                         help="fixed opponent strategy config")
    p_sweep.add_argument("--decks", type=int, default=100)
    p_sweep.add_argument("--deck-seed", type=int, default=20260101)
    p_sweep.add_argument("--repeats", type=int, default=1)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--parallelism", type=int, default=0)
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--quiet", action="store_true")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_timing = sub.add_parser("timing", help="per-move decision time")
    p_timing.add_argument("--strategy", required=True)
    p_timing.add_argument("--iterations", required=True,
                          help="comma-separated iteration counts")
    p_timing.add_argument("--samples", type=int, default=1000)
    p_timing.add_argument("--out")
    p_timing.set_defaults(func=_cmd_timing)

    p_match = sub.add_parser("match", help="play one match and print its log")
    p_match.add_argument("--hand", required=True)
    p_match.add_argument("--deck", required=True)
    p_match.add_argument("--deck-seed", type=int, default=0)
    p_match.add_argument("--seed", type=int, default=0)
    p_match.set_defaults(func=_cmd_match)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
