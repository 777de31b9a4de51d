"""Command-line interface.

Subcommands: assess, whatif, combine, validate, serve.
Exit codes: 0 success, 1 usage error, 2 data error, 3 engine
non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from riskbn.errors import RiskBnError
from riskbn.riskmodel.ops import assess_scenario, hazard_table
from riskbn.riskmodel.types import HazardRow
from riskbn.scenario.format import parse_scenario
from riskbn.scenario.overrides import apply_override
from riskbn.scenario.render import (
    parse_machine_report,
    render_hazard_table,
    render_report,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ENGINE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riskbn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    assess = sub.add_parser("assess", help="assess a scenario file")
    assess.add_argument("--scenario", required=True, type=Path)
    assess.add_argument("--format", choices=("table", "machine"), default="table")
    assess.add_argument(
        "--refine", action="store_true", help="refine risk grids before summarizing"
    )

    whatif = sub.add_parser("whatif", help="assess with overrides applied")
    whatif.add_argument("--scenario", required=True, type=Path)
    whatif.add_argument("--format", choices=("table", "machine"), default="table")
    whatif.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="override a scenario field, e.g. rework.quality=very_high",
    )

    combine = sub.add_parser(
        "combine", help="combine machine-format reports into a hazard table"
    )
    combine.add_argument("reports", nargs="+", type=Path)
    combine.add_argument("--format", choices=("table", "machine"), default="table")

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("--scenario", required=True, type=Path)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument(
        "--persist", type=Path, default=None, help="append-only session log"
    )
    return parser


def _read_scenario(path: Path):
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise RiskBnError(f"cannot read {path}: {exc}") from None
    return parse_scenario(data)


def _cmd_assess(args) -> int:
    scenario = _read_scenario(args.scenario)
    report = assess_scenario(scenario, refine_grids=args.refine)
    sys.stdout.buffer.write(
        render_report(report, args.format, product=scenario.device.name)
    )
    if args.refine and not report.meta.get("refinement_converged", True):
        print("warning: grid refinement did not converge", file=sys.stderr)
        return EXIT_ENGINE
    return EXIT_OK


def _cmd_whatif(args) -> int:
    scenario = _read_scenario(args.scenario)
    for item in args.overrides:
        path, sep, value = item.partition("=")
        if not sep:
            raise _UsageError(f"--set needs PATH=VALUE, got {item!r}")
        scenario = apply_override(scenario, path.strip(), value.strip())
    report = assess_scenario(scenario)
    sys.stdout.buffer.write(
        render_report(report, args.format, product=scenario.device.name)
    )
    return EXIT_OK


def _cmd_combine(args) -> int:
    if len(args.reports) < 2:
        raise _UsageError("combine needs at least two report files")
    rows = []
    for path in args.reports:
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise RiskBnError(f"cannot read {path}: {exc}") from None
        report = parse_machine_report(data)
        rows.append(HazardRow.from_report(path.stem, report))
    table = hazard_table(rows)
    sys.stdout.buffer.write(render_hazard_table(table, args.format))
    return EXIT_OK


def _cmd_validate(args) -> int:
    scenario = _read_scenario(args.scenario)
    problems = []
    embedded = getattr(scenario, "embedded_network", None)
    if embedded is not None:
        problems.extend(v.message for v in embedded.validate())
    if problems:
        for message in problems:
            print(f"invalid: {message}", file=sys.stderr)
        return EXIT_DATA
    print(f"ok: {args.scenario}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from riskbn.service.app import create_app

    app = create_app(persist_path=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "assess": _cmd_assess,
            "whatif": _cmd_whatif,
            "combine": _cmd_combine,
            "validate": _cmd_validate,
            "serve": _cmd_serve,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RiskBnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
