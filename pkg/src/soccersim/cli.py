"""Command line surface.

    soccersim run      [--config cfg.json] [--seed N] [--cycles N] ...
    soccersim heatmap  --field shooting_success --out grid.csv [--xi K] ...
    soccersim isolines --alphas 0.6,1.2,2.0 --out arcs.csv

`run` without --seed draws one from entropy and prints it so the match can
be reproduced. Flags override config-file values. Exit code 0 on success,
2 with a one-line diagnostic otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .exports import HEATMAP_FIELDS, export_heatmap, export_isolines
from .geometry import GoalFrame, PitchGeometry, Side
from .match import POLICY_NAMES, match_config_from_dict, run_match


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soccersim",
        description="Deterministic 2D soccer decision simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one seeded match")
    run.add_argument("--config", help="JSON file with match configuration")
    run.add_argument("--seed", type=int, help="base seed (default: entropy)")
    run.add_argument("--cycles", type=int, help="cycles to simulate")
    run.add_argument("--home-policy", choices=POLICY_NAMES)
    run.add_argument("--away-policy", choices=POLICY_NAMES)
    run.add_argument("--home-formation", help="e.g. 4-4-2 or 4-3-3")
    run.add_argument("--away-formation")
    run.add_argument("--no-noise", action="store_true",
                     help="disable perception noise")
    run.add_argument("--trace", help="write per-cycle JSON-lines trace here")
    run.add_argument("--report", help="write the JSON match report here")

    heat = sub.add_parser("heatmap", help="export an evaluation field as CSV")
    heat.add_argument("--field", required=True, choices=HEATMAP_FIELDS)
    heat.add_argument("--step", type=float, default=1.0, help="grid step, metres")
    heat.add_argument("--xi", type=int, default=0, help="interference level")
    heat.add_argument("--f", type=float, default=1.0, help="shooter ability")
    heat.add_argument("--f-max", type=float, default=1.0, help="ability ceiling")
    heat.add_argument("--side", choices=("left", "right"), default="right",
                      help="which goal defines the field")
    heat.add_argument("--out", required=True)

    iso = sub.add_parser("isolines", help="export equal-angle arcs as CSV")
    iso.add_argument("--alphas", required=True,
                     help="comma-separated visual angles in radians")
    iso.add_argument("--samples", type=int, default=256,
                     help="samples per arc")
    iso.add_argument("--side", choices=("left", "right"), default="right")
    iso.add_argument("--out", required=True)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    elif "seed" not in data:
        seed = int.from_bytes(os.urandom(4), "big")
        data["seed"] = seed
        print(f"seed: {seed} (drawn from entropy)")
    if args.cycles is not None:
        data["cycles"] = args.cycles
    for team, policy, formation in (("home", args.home_policy, args.home_formation),
                                    ("away", args.away_policy, args.away_formation)):
        overrides = {}
        if policy:
            overrides["policy"] = policy
        if formation:
            overrides["formation"] = formation
        if overrides:
            data[team] = {**data.get(team, {}), **overrides}
    if args.no_noise:
        data["noise"] = False
    if args.trace:
        data["trace_path"] = args.trace
    if args.report:
        data["report_path"] = args.report

    config = match_config_from_dict(data)
    report = run_match(config)
    print(f"seed {report.seed}: {config.home.policy} {report.score[0]} - "
          f"{report.score[1]} {config.away.policy} over {report.cycles} cycles")
    for team, stats in (("home", report.home), ("away", report.away)):
        print(f"  {team}: shots {stats.shots} (on target {stats.shots_on_target}), "
              f"passes {stats.pass_completions}/{stats.pass_attempts}, "
              f"interceptions {stats.interceptions}, "
              f"say sent/delivered/believed "
              f"{stats.messages_sent}/{stats.messages_delivered}/{stats.messages_believed}")
    if config.trace_path:
        print(f"trace: {config.trace_path}")
    if config.report_path:
        print(f"report: {config.report_path}")
    return 0


def _cmd_heatmap(args: argparse.Namespace) -> int:
    frame = GoalFrame(Side.RIGHT if args.side == "right" else Side.LEFT)
    with open(args.out, "w", newline="") as fh:
        rows = export_heatmap(args.field, frame, PitchGeometry(), args.step,
                              fh, f=args.f, f_max=args.f_max, xi=args.xi)
    print(f"{args.field}: {rows} nodes -> {args.out}")
    return 0


def _cmd_isolines(args: argparse.Namespace) -> int:
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError:
        raise ValueError(f"cannot parse --alphas {args.alphas!r}") from None
    frame = GoalFrame(Side.RIGHT if args.side == "right" else Side.LEFT)
    with open(args.out, "w", newline="") as fh:
        rows = export_isolines(alphas, frame, PitchGeometry(), fh,
                               samples_per_arc=args.samples)
    print(f"{len(alphas)} arcs, {rows} samples -> {args.out}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "heatmap": _cmd_heatmap,
                "isolines": _cmd_isolines}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
