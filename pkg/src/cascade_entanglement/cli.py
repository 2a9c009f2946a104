"""Command-line entry point.

::

    cascade-ent simulate --config FILE [--engine E] [--kappa K] [--tmax T] [--dt D] [--out PATH]
    cascade-ent figure {fig2,fig3a,fig3b,fig4} [--outdir DIR] [--tmax T] [--dt D] [--stride S]
    cascade-ent validate [--json] [--only KEY ...]

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .csvio import write_timeseries_csv
from .engines import run_scenario
from .errors import SimulationError
from .figures import FIGURES, run_figure
from .scenario import ENGINES, parse_scenario
from .validation import CHECKS, run_validate

log = logging.getLogger("cascade_entanglement")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _cmd_simulate(args) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_USAGE
    scenario = parse_scenario(text, engine=args.engine, kappa=args.kappa, t_max=args.tmax,
                              dt=args.dt, output=args.out)
    ts = run_scenario(scenario)
    if scenario.output:
        write_timeseries_csv(ts, scenario.output)
        log.info("wrote %d rows to %s", len(ts), scenario.output)
    else:
        import tempfile
        with tempfile.TemporaryDirectory() as tmp:
            path = write_timeseries_csv(ts, Path(tmp) / "out.csv")
            sys.stdout.write(path.read_text(encoding="ascii"))
    return EXIT_OK


def _cmd_figure(args) -> int:
    paths = run_figure(args.name, args.outdir, t_max=args.tmax, dt=args.dt, stride=args.stride)
    for p in paths:
        print(p)
    return EXIT_OK


def _cmd_validate(args) -> int:
    results = run_validate(args.only)
    if args.json:
        print(json.dumps({"passed": all(r.passed for r in results),
                          "checks": [r.as_dict() for r in results]}, indent=2))
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-ent", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and emit CSV")
    sim.add_argument("--config", required=True, help="key=value scenario file")
    sim.add_argument("--engine", choices=ENGINES)
    sim.add_argument("--kappa", type=float)
    sim.add_argument("--tmax", type=float)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--out", help="CSV path (stdout if omitted)")
    sim.set_defaults(func=_cmd_simulate)

    fig = sub.add_parser("figure", help="write the CSV curves of one figure")
    fig.add_argument("name", choices=FIGURES)
    fig.add_argument("--outdir", default=".")
    fig.add_argument("--tmax", type=float)
    fig.add_argument("--dt", type=float)
    fig.add_argument("--stride", type=int)
    fig.set_defaults(func=_cmd_figure)

    val = sub.add_parser("validate", help="run the cross-engine acceptance checks")
    val.add_argument("--json", action="store_true")
    val.add_argument("--only", nargs="+", choices=list(CHECKS), metavar="KEY")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (SimulationError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
