"""Append-only JSON Lines results store."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .analyze import AnalysisResult, PackageReport

SCHEMA_VERSION = 1
RUN = "run"
REPORT = "report"


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class ResultsStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, result: AnalysisResult) -> None:
        lines = [dict(line, kind=RUN, schemaVersion=SCHEMA_VERSION) for line in result.run_lines]
        lines.append(dict(result.report.to_dict(), kind=REPORT, schemaVersion=SCHEMA_VERSION))
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            for line in lines:
                fh.write(dumps(line) + "\n")

    def lines(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open(encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.strip()
                if raw:
                    out.append(json.loads(raw))
        return out

    def report_lines(self) -> list[dict]:
        return [line for line in self.lines() if line.get("kind") == REPORT]

    def latest_reports(self) -> dict[str, PackageReport]:
        """Most recent report per package name, in first-appearance order."""
        latest: dict[str, PackageReport] = {}
        for line in self.report_lines():
            report = PackageReport.from_dict(line)
            latest.pop(report.package, None)
            latest[report.package] = report
        return latest

    def compact(self) -> int:
        """Rewrite the store keeping only each package's latest report and its runs.

        Returns the number of lines dropped.
        """
        lines = self.lines()
        keep_version: dict[str, str] = {}
        for line in lines:
            if line.get("kind") == REPORT:
                keep_version[line["package"]["name"]] = line["package"]["version"]
        kept = []
        seen_reports = set()
        for line in reversed(lines):
            if line.get("kind") == REPORT:
                name = line["package"]["name"]
                if name in seen_reports:
                    continue
                seen_reports.add(name)
                kept.append(line)
            elif line.get("kind") == RUN:
                if keep_version.get(line["package"]) == line["version"]:
                    kept.append(line)
        kept.reverse()
        # drop duplicate run lines from repeated analyses of the same version
        unique = []
        seen = set()
        for line in kept:
            text = dumps(line)
            if text not in seen:
                seen.add(text)
                unique.append(line)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".results-", suffix=".jsonl")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for line in unique:
                fh.write(dumps(line) + "\n")
        os.replace(tmp, self.path)
        return len(lines) - len(unique)
