"""Command-line interface: analyze, report, export-sarif, verify, compact."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .pipeline import (
    CATEGORY_RANK,
    AnalysisConfig,
    AnalysisResult,
    ExecutionStrategy,
    ResultsStore,
    analyze_package,
    dumps_sarif,
    export_sarif,
    parse_pollutions,
    prioritize,
    verify_with_pollution,
)
from .pipeline.manifest import DEFAULT_ALLOW, DEFAULT_DENY, MANIFEST
from .taint.records import MODES

EXIT_OK = 0
EXIT_NO_EFFECT = 1
EXIT_IO = 2

OUT_ENV = "GADGETFORGE_OUT"
DEFAULT_OUT = "results.jsonl"
CATEGORIES = [c for c in sorted(CATEGORY_RANK, key=CATEGORY_RANK.get) if c != "None"]
MODE_COLUMNS = {"Standard": "Standard", "Special": "Special", "NameMatched": "Name"}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gadgetforge", description="Find prototype-pollution gadgets in MiniJS packages.")
    parser.add_argument("--out", default=os.environ.get(OUT_ENV, DEFAULT_OUT), help="results store (JSON Lines)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    analyze = sub.add_parser("analyze", help="analyze packages and append reports to the store")
    analyze.add_argument("packages", nargs="+", help="package dirs, corpus dirs, or list files")
    analyze.add_argument("--max-runs", type=_positive, default=None)
    analyze.add_argument("--step-budget", type=_positive, default=None)
    analyze.add_argument("--allow", action="append", default=None, help="allowed test-command pattern")
    analyze.add_argument("--deny", action="append", default=None, help="denied test-command pattern")
    analyze.add_argument("--jobs", type=_positive, default=1)
    analyze.add_argument("--special-table", default=None)

    report = sub.add_parser("report", help="print prioritized packages")
    report.add_argument("--top", type=_positive, default=None)

    export = sub.add_parser("export-sarif", help="write <package>.sarif from the latest report")
    export.add_argument("package", help="package name as stored in the results")
    export.add_argument("--dest", default=".", help="output directory")

    verify = sub.add_parser("verify", help="replay a package with polluted root-prototype properties")
    verify.add_argument("package", help="package directory")
    verify.add_argument("--pollute", action="append", default=[], metavar="KEY=VALUE")
    verify.add_argument("--command", default=None, help="test command to run (default: first allowed)")
    verify.add_argument("--step-budget", type=_positive, default=None)
    verify.add_argument("--special-table", default=None)

    sub.add_parser("compact", help="keep only the latest report per package")
    return parser


def _config(args) -> AnalysisConfig:
    kwargs = {}
    if getattr(args, "max_runs", None):
        kwargs["max_runs"] = args.max_runs
    if getattr(args, "step_budget", None):
        kwargs["step_budget"] = args.step_budget
    strategy = ExecutionStrategy(
        allow=tuple(args.allow) if getattr(args, "allow", None) else DEFAULT_ALLOW,
        deny=tuple(args.deny) if getattr(args, "deny", None) else DEFAULT_DENY,
    )
    return AnalysisConfig(strategy=strategy, special_table=getattr(args, "special_table", None), **kwargs)


def expand_packages(items: list[str]) -> list[Path]:
    """Resolve arguments to package directories.

    A directory with a manifest is a package; a directory without one is a corpus
    whose immediate subdirectories are packages; a file lists one path per line.
    """
    out: list[Path] = []
    for item in items:
        path = Path(item)
        if path.is_file():
            base = path.parent
            for line in path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line and not line.startswith("#"):
                    out.extend(expand_packages([str(base / line)]))
        elif path.is_dir():
            if (path / MANIFEST).exists():
                out.append(path)
            else:
                out.extend(sorted(p for p in path.iterdir() if p.is_dir() and not p.name.startswith(".")))
        else:
            raise FileNotFoundError(f"no such package or list file: {item}")
    return out


def _analyze_one(package_dir: str, config: AnalysisConfig) -> AnalysisResult:
    return analyze_package(package_dir, config)


def cmd_analyze(args) -> int:
    try:
        packages = expand_packages(args.packages)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    config = _config(args)
    store = ResultsStore(args.out)
    if args.jobs > 1 and len(packages) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_analyze_one, [str(p) for p in packages], [config] * len(packages)))
    else:
        results = [_analyze_one(str(p), config) for p in packages]
    try:
        for result in results:
            store.append(result)
            print(result.report.summary_line())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def report_rows(reports) -> list[list[str]]:
    header = ["package", "best"] + CATEGORIES + list(MODE_COLUMNS.values()) + ["runs", "status"]
    rows = [header]
    for rep in reports:
        modes = {m: 0 for m in MODES}
        for hit in rep.hits:
            modes[hit["mode"]] += 1
        row = [rep.package, rep.best_category() if rep.hits else "-"]
        row += [str(rep.category_summary.get(c, 0)) for c in CATEGORIES]
        row += [str(modes[m]) for m in MODE_COLUMNS]
        row += [str(len(rep.runs_meta)), rep.skipped_reason or "analyzed"]
        rows.append(row)
    return rows


def format_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def cmd_report(args) -> int:
    try:
        reports = list(ResultsStore(args.out).latest_reports().values())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not reports:
        print("no reports")
        return EXIT_OK
    ordered = prioritize(reports)
    if args.top is not None:
        ordered = ordered[: args.top]
    print(format_table(report_rows(ordered)))
    return EXIT_OK


def cmd_export_sarif(args) -> int:
    try:
        reports = ResultsStore(args.out).latest_reports()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = reports.get(args.package)
    if report is None:
        print(f"error: unknown package {args.package!r}", file=sys.stderr)
        return EXIT_IO
    dest = Path(args.dest) / f"{report.package}.sarif"
    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(dumps_sarif(export_sarif(report)), encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{dest} results={len(report.hits)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    package = Path(args.package)
    if not (package / MANIFEST).is_file():
        print(f"error: unknown package {args.package!r}", file=sys.stderr)
        return EXIT_IO
    try:
        pollutions = parse_pollutions(args.pollute)
        result = verify_with_pollution(package, pollutions, args.command, _config(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    outcome = result.outcome
    print(f"command: {result.command}")
    print(f"status: {outcome.status}")
    if outcome.error:
        print(f"error: {outcome.error}")
    for effect in result.effects:
        print("effect: " + json.dumps(effect, sort_keys=True))
    fired = result.sink_effects()
    print(f"sink effects: {len(fired)}")
    return EXIT_OK if fired else EXIT_NO_EFFECT


def cmd_compact(args) -> int:
    try:
        dropped = ResultsStore(args.out).compact()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"dropped {dropped} lines")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "report": cmd_report,
    "export-sarif": cmd_export_sarif,
    "verify": cmd_verify,
    "compact": cmd_compact,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.subcommand](args)


if __name__ == "__main__":
    sys.exit(main())
