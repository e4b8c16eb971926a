"""Command-line front end.

Examples::

    periodbound bound --config bound.ini
    periodbound sweep --jobs 4 --out results --format csv
    periodbound verify-all --out results
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Any, Sequence

from periodbound import __version__
from periodbound.config import KINDS, ConfigError, ScenarioConfig, default_config, load_config
from periodbound.errors import PeriodBoundError
from periodbound.io import atomic_write_text, dumps, rows_to_csv, trajectory_to_csv
from periodbound.scenarios import emit_plotdata, run

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# overrides applied by verify-all so that it covers the acceptance checks
VERIFY_ALL = {
    "bound": {"optimize": True},
    "sweep": {"remeasure": 20},
    "orbit": {},
    "proof-chain": {},
    "lv": {},
    "rd": {},
    "nse-estimate": {},
}


def _case_rows(report: dict[str, Any]) -> list[dict[str, Any]]:
    rows = []
    for case in report["cases"]:
        row = {"pass": case["pass"], "inputs": case["inputs"]}
        if case.get("outputs") is not None:
            row["outputs"] = case["outputs"]
        if "error" in case:
            row["error"] = case["error"]
        rows.append(row)
    return rows


def _write_outputs(report: dict[str, Any], cfg: ScenarioConfig, out_dir: str | None, fmt: str) -> None:
    name = cfg.kind
    for case in report["cases"]:
        traj = (case.get("outputs") or {}).pop("_trajectory", None)
        if traj is not None and out_dir:
            atomic_write_text(os.path.join(out_dir, f"{name}_trajectory.csv"), trajectory_to_csv(*traj))
    if fmt == "csv":
        text = rows_to_csv(_case_rows(report))
    else:
        text = dumps(report)
    if out_dir:
        atomic_write_text(os.path.join(out_dir, f"{name}.{fmt}"), text)
        if cfg.plot:
            atomic_write_text(os.path.join(out_dir, f"{name}_plot.csv"), emit_plotdata(report, cfg.plot))
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="periodbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scenario file (INI)")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for sweeps")
    common.add_argument("--seed", type=int, default=None, metavar="S", help="override the scenario seed")
    common.add_argument("--out", metavar="DIR", help="write reports here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS + ("verify-all",):
        sub.add_parser(kind, parents=[common])
    return parser


def _resolve(kind: str, args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        cfg = load_config(args.config)
        if cfg.kind != kind:
            raise ConfigError(f"config describes kind {cfg.kind!r}, not {kind!r}", key="scenario.kind")
    else:
        cfg = default_config(kind, **VERIFY_ALL[kind]) if args.command == "verify-all" else default_config(kind)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed must be an unsigned integer", key="--seed")
        cfg.seed = args.seed
    if args.format:
        cfg.format = args.format
    if args.out:
        cfg.out_dir = args.out
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "verify-all":
            if args.config:
                raise ConfigError("verify-all runs built-in scenarios and takes no --config")
            return _verify_all(args)
        cfg = _resolve(args.command, args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg, jobs=args.jobs)
        _write_outputs(report, cfg, cfg.out_dir, cfg.format)
    except PeriodBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    v = report["verdict"]
    print(f"{cfg.kind}: {v['status']} ({v['passed']} passed, {v['failed']} failed)", file=sys.stderr)
    return EXIT_PASS if v["status"] == "pass" else EXIT_FAIL


def _verify_all(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    reports = {}
    ok = True
    for kind in KINDS:
        cfg = _resolve(kind, args)
        report = run(cfg, jobs=args.jobs)
        if args.out:
            _write_outputs(report, cfg, args.out, cfg.format)
        else:
            for case in report["cases"]:
                (case.get("outputs") or {}).pop("_trajectory", None)
        v = report["verdict"]
        ok = ok and v["status"] == "pass"
        reports[kind] = report
        print(f"{kind:>13}: {v['status']} ({v['passed']} passed, {v['failed']} failed)", file=sys.stderr)
    summary = {
        "scenario": {"kind": "verify-all"},
        "cases": [{"inputs": {"kind": k}, "outputs": r["verdict"], "pass": r["verdict"]["status"] == "pass"}
                  for k, r in reports.items()],
        "verdict": {"status": "pass" if ok else "fail",
                    "passed": sum(r["verdict"]["status"] == "pass" for r in reports.values()),
                    "failed": sum(r["verdict"]["status"] != "pass" for r in reports.values())},
        "version": __version__,
        "duration_s": time.perf_counter() - start,
    }
    if args.out:
        atomic_write_text(os.path.join(args.out, "verify-all.json"), dumps(summary))
    else:
        sys.stdout.write(dumps(summary))
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
