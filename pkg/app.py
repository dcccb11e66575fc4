"""
Command-line entry point for the amenability toolkit.

    python app.py run scenarios/z_balls.json --format tabular
    python app.py validate scenarios/f2_balls.json
    python app.py list-families

Exit status: 0 when every certification passes, 1 when one fails, 2 on error.
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from components.groups import FAMILIES
from pipeline.report import FORMATS, emit
from pipeline.scenario import NET_FAMILIES, SPACE_KINDS, SUITE_FAMILIES, load_scenario
from pipeline.scenario_runner import ScenarioRunner
from utils.logging_utils import logger

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amenability",
        description="Exact certification of approximate invariant means and Følner deficits.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario and emit its report")
    run.add_argument("scenario", help="path to a JSON scenario file")
    run.add_argument("--format", choices=FORMATS, default="structured")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--stages", type=int, help="override the number of net stages")
    run.add_argument("--window-radius", type=int, help="override the group radius of every window")

    validate = commands.add_parser("validate", help="parse a scenario and build its windows and nets")
    validate.add_argument("scenario", help="path to a JSON scenario file")

    commands.add_parser("list-families", help="list group, space, net and suite families")
    return parser


def list_families() -> str:
    lines = ["groups:"]
    lines.extend(f"  {name}: {description}" for name, description in FAMILIES.items())
    lines.append("spaces:")
    lines.extend(f"  {kind}" for kind in SPACE_KINDS)
    lines.append("nets:")
    lines.extend(f"  {family}" for family in NET_FAMILIES)
    lines.append("suites:")
    lines.extend(f"  {suite}: {', '.join(families)}" for suite, families in SUITE_FAMILIES.items())
    return "\n".join(lines) + "\n"


def _write(data: bytes, out: Optional[str]):
    if out:
        Path(out).write_bytes(data)
        logger.info(f"CLI: report written to {out}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-families":
        _write(list_families().encode("utf-8"), None)
        return EXIT_PASS
    try:
        scenario = load_scenario(args.scenario)
        if args.command == "validate":
            runner = ScenarioRunner(scenario)
            stages = runner.validate()
            logger.info(f"CLI: {args.scenario} is valid ({len(runner.windows)} windows, {stages} stages)")
            return EXIT_PASS
        runner = ScenarioRunner(scenario, stages=args.stages, window_radius=args.window_radius)
        report = runner.run()
        _write(emit(report, args.format), args.out)
    except (ValueError, OSError) as e:
        logger.error(f"CLI: {str(e)}")
        return EXIT_ERROR
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
