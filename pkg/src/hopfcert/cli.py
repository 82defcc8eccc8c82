"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 invariant or oracle
failure, 4 resource bound exceeded.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .field import FieldError
from .groups import BoundExceeded, GroupError, InvariantViolation
from .report import COMMANDS, ConfigError, RunConfig, dumps, run

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_BOUND = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopfcert",
                                     description="Obstruction certificates for twisted group algebras.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", help="sl2, psl2, sl3 or sz")
        p.add_argument("--q", type=int, help="field size, a prime power")
        p.add_argument("--m", help="subgroup spec, e.g. klein:x=2,y=3, U, E=1,g, L1, M2, Z2x2")
        p.add_argument("--tau", help="override tau as row-major entry codes, e.g. 1,0,1,1")
        p.add_argument("--kind", help="class function: induced_sylow, phi_q1, phi_5, phi_7")
        p.add_argument("--bound", type=int, help="enumeration bound (default $HOPFCERT_BOUND or 2e6)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--cache-dir", help="group cache directory ('' disables the cache)")
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--include-sz32", action="store_true", help="selftest: add the Sz(32) census")
        p.add_argument("--full", action="store_true", help="character: dump every value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command, family=args.family, q=args.q, m=args.m, tau=args.tau,
                    kind=args.kind, bound=args.bound, workers=args.workers,
                    cache_dir=args.cache_dir, output=args.output, seed=args.seed,
                    include_sz32=args.include_sz32, full=args.full)
    start = time.perf_counter()
    try:
        report = run(cfg)
    except BoundExceeded as exc:
        print(f"hopfcert: bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except InvariantViolation as exc:
        print(f"hopfcert: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, GroupError, FieldError) as exc:
        print(f"hopfcert: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = dumps(report)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"hopfcert: {cfg.command} finished in {time.perf_counter() - start:.2f}s", file=sys.stderr)
    if cfg.command == "selftest" and not report["payload"]["all_pass"]:
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
