"""Command-line entry point: ``hostsort {solve,simulate,sweep,curves,validate}``.

Exit codes: 0 success, 2 validation error, 3 numeric/solver error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .abm import ABMConfig, simulate
from .errors import ConfigError, HostsortError, NumericError, UnsupportedConfigurationError
from .scenario import (
    CURVES_HEADER,
    EQUILIBRIA_HEADER,
    SWEEP_HEADER,
    TRAJECTORY_HEADER,
    abm_summary,
    emit_utility_curves,
    load_scenario,
    run_scenario,
    run_sweep,
    write_csv,
    write_summary,
)

log = logging.getLogger("hostsort")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _cmd_validate(args, s) -> None:
    print(f"{args.scenario}: ok ({s.name})")


def _cmd_solve(args, s) -> None:
    result = run_scenario(s, run_abm=False)
    if args.format == "summary":
        path = write_summary(args.out / "summary.json", {"scenario": s.name, **result.summary()})
    else:
        path = write_csv(args.out / "equilibria.csv", EQUILIBRIA_HEADER, [result.equilibria_row()])
    print(path)


def _cmd_simulate(args, s) -> None:
    cfg = s.abm if s.abm is not None else ABMConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    result = simulate(s.market, s.demand, s.supply, cfg)
    if args.format == "summary":
        path = write_summary(
            args.out / f"summary_{cfg.seed}.json", {"scenario": s.name, "abm": abm_summary(result)}
        )
    else:
        path = write_csv(
            args.out / f"trajectory_{cfg.seed}.csv", TRAJECTORY_HEADER, result.trajectory_rows()
        )
    if not result.converged:
        log.warning("simulation did not converge within %d rounds", cfg.max_rounds)
    print(path)


def _cmd_sweep(args, s) -> None:
    table = run_sweep(s, workers=args.workers)
    if args.format == "summary":
        payload = {
            "scenario": s.name,
            "parameter": table.parameter,
            "rows": [dict(zip(SWEEP_HEADER, r.as_list())) for r in table.rows],
        }
        path = write_summary(args.out / "sweep.json", payload)
    else:
        path = write_csv(args.out / "sweep.csv", SWEEP_HEADER, [r.as_list() for r in table.rows])
    print(path)


def _cmd_curves(args, s) -> None:
    curves = emit_utility_curves(s, args.grid_size)
    if args.format == "summary":
        payload = {"scenario": s.name, "rows": [dict(zip(CURVES_HEADER, r)) for r in curves.rows()]}
        path = write_summary(args.out / "utility_curves.json", payload)
    else:
        path = write_csv(args.out / "utility_curves.csv", CURVES_HEADER, curves.rows())
    print(path)


COMMANDS = {
    "validate": (_cmd_validate, "load and check a scenario file"),
    "solve": (_cmd_solve, "solve the free-listing, sorting and planner regimes"),
    "simulate": (_cmd_simulate, "run the agent-based sorting simulation"),
    "sweep": (_cmd_sweep, "solve the closed regimes across the scenario's sweep values"),
    "curves": (_cmd_curves, "tabulate tenant utility in allowing vs. forbidding buildings"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hostsort", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--scenario", required=True, type=Path, help="scenario YAML file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override abm.seed")
        p.add_argument("--format", choices=("csv", "summary"), default="csv")
        if name == "curves":
            p.add_argument("--grid-size", type=int, default=101)
        if name == "sweep":
            p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler, _ = COMMANDS[args.command]
    try:
        scenario = load_scenario(args.scenario)
        handler(args, scenario)
    except (NumericError, UnsupportedConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except HostsortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
