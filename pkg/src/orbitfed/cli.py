"""
Command-line entry point.

    orbitfed windows          --scenario fig3 --horizon 64800
    orbitfed run-fedleo       --scenario paper_default
    orbitfed run-star         --scenario paper_default
    orbitfed compare          --scenario paper_default --seed 7
    orbitfed partition-report --scenario paper_default

Exit status: 0 on success, 1 on a usage or validation error, 2 when the
simulation itself fails.  ORBITFED_OUT, when set, overrides --out.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import reporting
from .orbital_mechanics import compute_access_windows
from .scenario import Scenario, ScenarioError, load_scenario
from .sim_runner import SimContext, compare_results, run_fedleo, run_star_baseline

log = logging.getLogger("orbitfed")

COMMANDS = ("windows", "run-fedleo", "run-star", "compare", "partition-report")
EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for runtime failures here
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orbitfed", description="FedLEO constellation federated-learning simulator")
    parser.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    parser.add_argument("--scenario", default="paper_default",
                        help="scenario TOML path or bundled name (paper_default, fig3)")
    parser.add_argument("--horizon", type=float, help="simulated horizon in seconds")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", default="out", help="output directory (ORBITFED_OUT overrides)")
    parser.add_argument("--mode", choices=("fixed-rate", "shannon"), help="link rate model")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def resolve_scenario(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario)
    changes = {}
    if args.horizon is not None:
        changes["horizon_s"] = args.horizon
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.mode is not None:
        changes["link"] = dataclasses.replace(scenario.link, mode=args.mode)
    return scenario.with_overrides(**changes) if changes else scenario


def _windows(scenario: Scenario, out: Path) -> list[Path]:
    spec = scenario.constellation.build()
    windows = compute_access_windows(
        spec, scenario.ground_station.build(), (0.0, scenario.horizon_s),
        scenario.solver.build(), scenario.constants.build(),
    )
    return [reporting.write_windows(windows, out)]


def _partition(scenario: Scenario, out: Path) -> list[Path]:
    ctx = SimContext.from_scenario(scenario, windows={})
    text = reporting.partition_csv(ctx.shards, ctx.test.num_classes)
    return [reporting.write_text(out, "partition.csv", text)]


def execute(command: str, scenario: Scenario, out: Path) -> list[Path]:
    if command == "windows":
        return _windows(scenario, out)
    if command == "partition-report":
        return _partition(scenario, out)
    ctx = SimContext.from_scenario(scenario)
    paths = [reporting.write_windows(ctx.windows, out)]
    if command == "run-fedleo":
        return paths + reporting.write_run(run_fedleo(ctx), out)
    if command == "run-star":
        return paths + reporting.write_run(run_star_baseline(ctx), out)
    fedleo, star = run_fedleo(ctx), run_star_baseline(ctx)
    comparison = compare_results(fedleo, star)
    paths += reporting.write_comparison(comparison, fedleo, star, out)
    sys.stdout.write(reporting.comparison_summary(comparison))
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command not in COMMANDS:
            raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"orbitfed: error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = Path(os.environ.get("ORBITFED_OUT") or args.out)
    try:
        scenario = resolve_scenario(args)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"orbitfed: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        paths = execute(args.command, scenario, out)
    except Exception as exc:  # noqa: BLE001 - any simulation failure maps to exit 2
        log.debug("run failed", exc_info=True)
        print(f"orbitfed: {args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
