"""Command line entry point: quadricnets verify | dump-preset | list-presets."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from sympy import isprime

from . import __version__
from .runner import EXIT_USAGE, PRESETS, Options, dump_preset, emit_report, run_path, run_preset
from .scenario import ScenarioError

log = logging.getLogger("quadricnets")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quadricnets", description="Exact checks for nets of quadrics and related constructions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the checks of a preset or scenario file")
    v.add_argument("target", help=f"preset name ({', '.join(PRESETS)}, all) or path to a .scn file")
    v.add_argument("--prime", type=int, help="prime for modular computations (default 32003)")
    v.add_argument("--exact", action="store_true", help="use rational arithmetic where it is feasible")
    v.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--out", type=Path, help="write the report here instead of stdout")

    d = sub.add_parser("dump-preset", help="print a preset as scenario text")
    d.add_argument("name")

    sub.add_parser("list-presets", help="list built-in presets")
    return p


def _usage(msg: str) -> int:
    print(f"quadricnets: {msg}", file=sys.stderr)
    return EXIT_USAGE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-presets":
        for name in PRESETS:
            print(name)
        return 0

    if args.command == "dump-preset":
        if args.name not in PRESETS:
            return _usage(f"unknown preset {args.name!r}; valid presets: {', '.join(PRESETS)}")
        sys.stdout.write(dump_preset(args.name))
        return 0

    if args.prime is not None and (args.prime < 3 or not isprime(args.prime)):
        return _usage(f"--prime must be an odd prime, got {args.prime}")
    if args.jobs < 1:
        return _usage("--jobs must be at least 1")
    opts = Options(prime=args.prime, exact=args.exact, jobs=args.jobs)

    target = args.target
    try:
        if target in PRESETS or target == "all":
            report = run_preset(target, opts)
        elif Path(target).is_file():
            report = run_path(target, opts)
        else:
            return _usage(f"{target!r} is neither a preset nor a file; valid presets: "
                          f"{', '.join(PRESETS + ('all',))}")
    except ScenarioError as exc:
        return _usage(str(exc))

    text = emit_report(report, args.format)
    if args.out:
        args.out.write_text(text)
        log.info("report written to %s", args.out)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
