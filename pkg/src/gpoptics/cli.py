"""Command-line entry point.

    gpoptics run <config.json> [--out DIR] [--quiet]
    gpoptics validate <config.json>
    gpoptics version

Exit codes: 0 success, 1 assertion failure, 2 config error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from . import __version__, _kernels
from .config import validate_config
from .errors import ConfigError, GPOpticsError
from .scenarios import run_scenario

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="gpoptics", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write its report and artifacts")
    run.add_argument("config")
    run.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    run.add_argument("--quiet", action="store_true", help="print nothing on success")
    val = sub.add_parser("validate", help="check a config and print it with defaults filled")
    val.add_argument("config")
    sub.add_parser("version", help="print version and kernel backend")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "version":
        print(f"gpoptics {__version__} (kernels: {_kernels.BACKEND})")
        return EXIT_OK
    try:
        cfg = validate_config(args.config)
        _kernels.thread_count()
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(json.dumps(cfg.effective(), indent=2, sort_keys=True))
        return EXIT_OK
    try:
        report = run_scenario(cfg, out_dir=args.out)
    except GPOpticsError as exc:
        print(f"scenario {cfg.scenario!r} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        print(f"internal error in scenario {cfg.scenario!r}:", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL
    if not args.quiet or not report["passed"]:
        for item in report["assertions"]:
            mark = "PASS" if item["passed"] else "FAIL"
            print(f"[{mark}] {cfg.scenario}: {item['name']}")
        out = args.out if args.out is not None else cfg.output_dir
        print(f"report: {out}/{report['files'].get('report', '')}")
    return EXIT_OK if report["passed"] else EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
