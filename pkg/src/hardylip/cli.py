"""Command line front end: ``hardylip verify | sc-fit | report``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .conformal import Normalization, sc_solve, sector_certificate
from .errors import ConfigError, CrowdingError, HardyLipError, SolverError
from .geometry import LipschitzGraph
from .suites import SUITES, load_config, run_suite, write_csv_bundle, write_json

log = logging.getLogger("hardylip")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _complex_arg(text: str) -> complex:
    try:
        u, v = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'u,v', got {text!r}") from None
    return complex(u, v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardylip", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites and write report.json")
    v.add_argument("--config", required=True, type=Path)
    v.add_argument("--suite", help=f"comma separated subset of {','.join(SUITES)}")
    v.add_argument("--out", type=Path, help="output directory (default: from config, else ./hardylip-report)")
    v.add_argument("--csv", action="store_true", help="also write the CSV bundle")

    s = sub.add_parser("sc-fit", help="solve the Schwarz-Christoffel map of a polygonal graph")
    s.add_argument("--graph", required=True, type=Path)
    s.add_argument("--pin-c1", type=float, default=None, help="fix the first prevertex")
    s.add_argument("--base-value", type=_complex_arg, default=None, help="image of i, as 'u,v'")
    s.add_argument("--base-point", type=_complex_arg, default=complex(0, 1), help="normalization point, as 'x,y'")

    r = sub.add_parser("report", help="re-emit a saved report")
    r.add_argument("--input", required=True, type=Path)
    r.add_argument("--format", choices=("json", "csv-bundle"), default="json")
    r.add_argument("--out", required=True, type=Path)
    return parser


def _cmd_verify(args) -> int:
    suites = args.suite.split(",") if args.suite else None
    cfg = load_config(args.config, suites, None if args.out is None else str(args.out))
    out = Path(cfg.out or "hardylip-report")
    report = run_suite(cfg)
    try:
        path = write_json(report, out)
        if args.csv:
            write_csv_bundle(report, out)
    except OSError as exc:
        raise ConfigError(f"cannot write report: {exc}") from exc
    s = report.summary
    for rec in report.records:
        if rec.status != "pass":
            d = rec.to_dict()
            print(f"{rec.status.upper()}: {rec.suite}[{rec.index}] {d.get('bound_name')} "
                  f"{d.get('error') or d.get('parameters')}", file=sys.stderr)
    print(f"{s['pass']} pass, {s['fail']} fail, {s['error']} error -> {path}", file=sys.stderr)
    return report.exit_status


def _cmd_sc_fit(args) -> int:
    try:
        graph = LipschitzGraph.load(args.graph)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read graph {args.graph}: {exc}") from exc
    norm = Normalization(args.base_point, args.base_value, args.pin_c1)
    try:
        m, rep = sc_solve(graph, norm, return_report=True)
    except (SolverError, CrowdingError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        residuals = getattr(exc, "residuals", None)
        for i, res in enumerate([] if residuals is None else residuals):
            print(f"  vertex {i}: residual {res:.3e}", file=sys.stderr)
        return EXIT_FAIL
    json.dump(m.to_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    print("vertex  residual", file=sys.stderr)
    for i, res in enumerate(rep.residuals):
        print(f"{i:6d}  {res:.3e}", file=sys.stderr)
    sector = sector_certificate(m, graph.M)
    print(f"sector certificate: {'pass' if sector.passed else 'fail'} "
          f"(worst |Im|/Re = {sector.worst_ratio:.6g}, M = {graph.M:.6g})", file=sys.stderr)
    return EXIT_OK if sector.passed else EXIT_FAIL


def _cmd_report(args) -> int:
    try:
        data = json.loads(args.input.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {args.input}: {exc}") from exc
    if not isinstance(data, dict) or "records" not in data:
        raise ConfigError(f"{args.input} is not a hardylip report")
    try:
        if args.format == "json":
            paths = [write_json(data, args.out)]
        else:
            paths = write_csv_bundle(data, args.out)
    except OSError as exc:
        raise ConfigError(f"cannot write to {args.out}: {exc}") from exc
    for p in paths:
        print(p)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"verify": _cmd_verify, "sc-fit": _cmd_sc_fit, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HardyLipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if args.command == "sc-fit" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
