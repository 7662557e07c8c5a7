"""Command line interface.

``run --config PATH [--out DIR]``
    Solve a scenario and write ``<name>.csv`` and ``<name>.json``.
``verify [--suite NAME] [--seed N] [--out DIR]``
    Run verification suites; prints one line per suite.
``sweep --config PATH --axis KEY=V1,V2,... [--out DIR] [--threads N]``
    Run a scenario once per axis value and write an aggregated CSV.

Exit status is 0 on success, 1 on a verification or numerical failure and
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import yaml

from ..errors import ConfigError, ScenarioError
from .config import load_scenario
from .runner import default_out_dir, parse_axis, run, sweep
from .suites import SUITES, verify

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lrfermi", description="Mean-field dynamics of long-range lattice fermions.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="solve a scenario")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--out", type=Path, default=None, help="output directory (default $LRFERMI_OUT or ./out)")
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=sorted(SUITES), default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", type=Path, default=None, help="write the check records as CSV here")
    s = sub.add_parser("sweep", help="run a scenario along a parameter axis")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--axis", required=True, help="KEY=V1,V2,... with KEY a dotted path such as model.gamma")
    s.add_argument("--out", type=Path, default=None)
    s.add_argument("--threads", type=int, default=1, help="worker threads for sweep points")
    return p


def _verify(args) -> int:
    report = verify(args.suite, args.seed)
    summary = report.summary()
    for name, counts in summary.items():
        if name == "total":
            continue
        status = "PASS" if counts["failed"] == 0 else "FAIL"
        print(f"{status} {name}: {counts['passed']} passed, {counts['failed']} failed "
              f"({report.timings.get(name, 0.0):.1f} s)")
    for rec in report.failures:
        print(f"  failed {rec.suite}/{rec.check} [{rec.inputs}]: lhs={rec.lhs:.6g} rhs={rec.rhs:.6g} "
              f"tol={rec.tolerance:.1g} ({rec.statement})")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"verify-seed{args.seed}.csv"
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(report.records[0].as_row()), lineterminator="\n")
            w.writeheader()
            for rec in report.records:
                w.writerow(rec.as_row())
        print(f"records written to {path}")
    return EXIT_OK if report.ok else EXIT_FAILURE


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            sc = load_scenario(args.config)
            csv_path, json_path = run(sc, args.out or default_out_dir())
            print(f"wrote {csv_path} and {json_path}")
            return EXIT_OK
        if args.command == "verify":
            return _verify(args)
        if args.threads < 1:
            raise ConfigError("--threads", "expected a positive integer")
        load_scenario(args.config)
        doc = yaml.safe_load(args.config.read_text())
        key, values = parse_axis(args.axis)
        path = sweep(doc, key, values, args.out or default_out_dir(), args.threads)
        print(f"wrote {path}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
