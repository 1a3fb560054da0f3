"""Command line entry point.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad
configuration, unknown fixtures or failed preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import LocalMUError
from .fixtures import BUILTINS, FixtureError, load_fixture
from .harness import SUITES, RunConfig, run

SUBCOMMAND_SUITES = {
    "verify-isometry": "isometry",
    "midpoint": "midpoint",
    "extend": "extension",
    "counterexample": "counterexamples",
}


def _common(p: argparse.ArgumentParser, fixture_required: bool = True) -> None:
    p.add_argument("--fixture", required=fixture_required,
                   help="built-in fixture name or path to a fixture JSON file")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tol-abs", type=float, default=1e-9)
    p.add_argument("--tol-rel", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=2000, help="samples per check family")
    p.add_argument("--out", help="write the JSON report here instead of standard output")
    p.add_argument("--csv", help="write per-sample defects as CSV for plotting")
    p.add_argument("--force", action="store_true",
                   help="run the pipeline even when its preconditions fail")
    p.add_argument("--timing", action="store_true",
                   help="add wall time to the report (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localmu",
                                     description="Verify local isometry-extension identities on fixtures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, suite in SUBCOMMAND_SUITES.items():
        p = sub.add_parser(name, help=f"run the {suite} suite on one fixture")
        if name == "counterexample":
            p.add_argument("name", nargs="?", help="counterexample fixture name")
            _common(p, fixture_required=False)
        else:
            _common(p)
    p = sub.add_parser("report", help="run a suite selection on one or all built-in fixtures")
    p.add_argument("--suite", choices=SUITES, default="all")
    _common(p, fixture_required=False)
    sub.add_parser("list-fixtures", help="list built-in fixtures")
    return parser


def _emit(report_text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(report_text)
    else:
        sys.stdout.write(report_text)


def _summary(report) -> None:
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"[{mark}] {report.config['fixture']}: {c.name} = {c.value!r} "
              f"({c.relation} {c.tolerance!r})", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list-fixtures":
        for name in sorted(BUILTINS):
            fx = load_fixture(name)
            print(f"{name}\t{fx.kind}\t{fx.description}")
        return 0

    try:
        if args.command == "report":
            names = [args.fixture] if args.fixture else sorted(BUILTINS)
            suite = args.suite
        else:
            fixture = args.fixture
            if args.command == "counterexample":
                fixture = args.name or args.fixture
                if fixture is None:
                    raise FixtureError("counterexample needs a fixture name")
            names = [fixture]
            suite = SUBCOMMAND_SUITES[args.command]
        reports = []
        for name in names:
            cfg = RunConfig(fixture=name, suite=suite, tol_abs=args.tol_abs, tol_rel=args.tol_rel,
                            samples=args.samples, seed=args.seed, force=args.force,
                            out=args.out, csv=args.csv)
            fx = load_fixture(name)
            if args.command == "report" and suite == "counterexamples" and fx.kind != "counterexample":
                continue
            start = time.perf_counter()
            rep = run(cfg, fx)
            if args.timing:
                rep.wall_time = time.perf_counter() - start
            reports.append(rep)
    except (LocalMUError, FixtureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for rep in reports:
        _summary(rep)
    if len(reports) == 1:
        text = reports[0].to_json()
    else:
        text = json.dumps({"reports": [r.to_dict() for r in reports],
                           "verdict": "pass" if all(r.passed for r in reports) else "fail"},
                          indent=2) + "\n"
    _emit(text, args.out)
    if args.csv:
        if len(reports) == 1:
            reports[0].write_csv(args.csv)
        else:
            import csv
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["fixture", "check", "sample", "defect"])
                for r in reports:
                    for c in r.checks:
                        for i, v in enumerate(c.series or []):
                            w.writerow([r.config["fixture"], c.name, i, repr(float(v))])
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
