"""Package-level analysis: pre-analysis, scheduled runs, dedup and the report."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from ..host import HostEnv
from ..interpreter import BUDGET, COMPLETED, DEFAULT_STEP_BUDGET, UNCAUGHT, HookSet, HostCallCounter, Interpreter, RunOutcome
from ..scheduler import (
    DEFAULT_MAX_RUNS,
    AnalysisState,
    RunResult,
    absorb,
    all_records,
    next_plan,
    seed_from_unintrusive,
    unintrusive_plan,
)
from ..taint import RunObservations, RunPlan, SinkHit, TaintAnalysis
from .manifest import ExecutionStrategy, ManifestError, PackageManifest, command_target, content_version

NAME_FILTERED = "NameFiltered"
NO_TESTS = "NoTests"
NO_HOST_API = "NoHostApi"
DRY_RUN_FAILED = "DryRunFailed"
UNREADABLE = "Unreadable"
SKIP_ORDER = (UNREADABLE, NAME_FILTERED, NO_TESTS, NO_HOST_API, DRY_RUN_FAILED)

CATEGORY_RANK = {"ACE": 0, "ACI": 1, "LFI": 2, "FileWrite": 3, "FileRead": 4, "Network": 5, "None": 6}


@dataclass
class AnalysisConfig:
    max_runs: int = DEFAULT_MAX_RUNS
    step_budget: int = DEFAULT_STEP_BUDGET
    strategy: ExecutionStrategy = field(default_factory=ExecutionStrategy)
    special_table: str | None = None

    def __post_init__(self) -> None:
        if self.max_runs < 1 or self.step_budget < 1:
            raise ValueError("budgets must be positive")


@dataclass
class PreAnalysis:
    uses_host_api: bool
    dry_run_ok: bool
    skipped: str | None
    commands: list = field(default_factory=list)


def run_command(package_dir, command: str, hooks: HookSet, config: AnalysisConfig) -> RunOutcome:
    """Execute one test command in a fresh interpreter."""
    host = HostEnv(config.special_table)
    interp = Interpreter(package_dir, host, hooks, config.step_budget)
    target = command_target(command)
    if target is None:
        return RunOutcome(UNCAUGHT, [], [], 0, f"unsupported test command: {command}")
    return interp.run_file(target)


def pre_analyze(package_dir, manifest: PackageManifest, config: AnalysisConfig) -> PreAnalysis:
    strategy = config.strategy
    if strategy.name_filtered(manifest.name):
        return PreAnalysis(False, False, NAME_FILTERED)
    commands = strategy.allowed_commands(manifest.test_commands)
    if not commands:
        return PreAnalysis(False, False, NO_TESTS)
    uses_host = False
    ok = False
    for command in commands:
        counter = HostCallCounter()
        outcome = run_command(package_dir, command, counter, config)
        uses_host |= any(category != "None" for _, _, category in counter.calls)
        ok |= outcome.status == COMPLETED
    if not uses_host:
        return PreAnalysis(False, ok, NO_HOST_API, commands)
    if not ok:
        return PreAnalysis(True, False, DRY_RUN_FAILED, commands)
    return PreAnalysis(True, True, None, commands)


@dataclass
class CommandRun:
    command: str
    outcome: RunOutcome

    def meta(self) -> dict:
        return {
            "command": self.command,
            "status": self.outcome.status,
            "stepsUsed": self.outcome.steps,
            "error": self.outcome.error,
        }


def execute_plan(package_dir, commands: list[str], plan: RunPlan, config: AnalysisConfig) -> tuple[RunResult, list]:
    """Run every allowed command under ``plan``; observations are shared across commands."""
    obs = RunObservations()
    runs = []
    for command in commands:
        hooks = TaintAnalysis(plan, command, obs)
        runs.append(CommandRun(command, run_command(package_dir, command, hooks, config)))
    result = RunResult(plan, obs.records, obs.hits, obs.candidates, [r.outcome.status for r in runs])
    return result, runs


def _run_status(runs: list[CommandRun]) -> str:
    statuses = {r.outcome.status for r in runs}
    for status in (BUDGET, UNCAUGHT):
        if status in statuses:
            return status
    return COMPLETED


@dataclass
class PackageReport:
    package: str
    version: str
    hits: list = field(default_factory=list)  # list of dicts, sorted by flow key
    category_summary: dict = field(default_factory=dict)
    mode_summary: dict = field(default_factory=dict)
    runs_meta: list = field(default_factory=list)
    branches: list = field(default_factory=list)
    skipped_reason: str | None = None
    path: str = ""

    def to_dict(self) -> dict:
        return {
            "package": {"name": self.package, "version": self.version},
            "path": self.path,
            "hits": self.hits,
            "categorySummary": self.category_summary,
            "modeSummary": self.mode_summary,
            "runsMeta": self.runs_meta,
            "branches": self.branches,
            "skippedReason": self.skipped_reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PackageReport":
        return cls(
            package=d["package"]["name"],
            version=d["package"]["version"],
            hits=d["hits"],
            category_summary=d["categorySummary"],
            mode_summary=d.get("modeSummary", {}),
            runs_meta=d["runsMeta"],
            branches=d["branches"],
            skipped_reason=d["skippedReason"],
            path=d.get("path", ""),
        )

    def best_category(self) -> str:
        if not self.category_summary:
            return "None"
        return min(self.category_summary, key=lambda c: CATEGORY_RANK.get(c, len(CATEGORY_RANK)))

    def summary_line(self) -> str:
        if self.skipped_reason:
            return f"{self.package}: skipped {self.skipped_reason}"
        cats = " ".join(
            f"{c}={n}" for c, n in sorted(self.category_summary.items(), key=lambda kv: CATEGORY_RANK.get(kv[0], 99))
        )
        runs = f"runs={len(self.runs_meta)}"
        return f"{self.package}: {cats} {runs}" if cats else f"{self.package}: no hits {runs}"

    def sink_hits(self) -> list[SinkHit]:
        return [SinkHit.from_dict(h) for h in self.hits]


def dedup_hits(hits: list[SinkHit]) -> list[dict]:
    """One entry per FlowKey; every distinct occurrence is kept alongside."""
    grouped: dict = {}
    for hit in hits:
        key = hit.flow_key
        if key not in grouped:
            grouped[key] = (hit, [])
        occ = hit.occurrence()
        if occ not in grouped[key][1]:
            grouped[key][1].append(occ)
    out = []
    for key in sorted(grouped, key=lambda k: k.sort_key()):
        hit, occurrences = grouped[key]
        entry = hit.to_dict()
        entry["occurrences"] = occurrences
        out.append(entry)
    return out


def build_report(manifest: PackageManifest, version: str, state: AnalysisState, runs_meta: list) -> PackageReport:
    hits = dedup_hits(state.hits)
    categories = Counter(h["category"] for h in hits)
    modes = Counter(h["mode"] for h in hits)
    branches = [r.to_dict() for r in all_records(state)]
    return PackageReport(
        package=manifest.name,
        version=version,
        hits=hits,
        category_summary=dict(sorted(categories.items())),
        mode_summary=dict(sorted(modes.items())),
        runs_meta=runs_meta,
        branches=branches,
    )


@dataclass
class AnalysisResult:
    report: PackageReport
    run_lines: list  # per-run records for the results store


def _run_line(manifest, version, plan, runs: list[CommandRun]) -> dict:
    return {
        "package": manifest.name,
        "version": version,
        "plan": plan.to_dict(),
        "commands": [dict(r.meta(), effects=r.outcome.effects, stdout=r.outcome.stdout) for r in runs],
    }


def analyze_package(package_dir, config: AnalysisConfig | None = None) -> AnalysisResult:
    """Pre-analysis, the unintrusive run, then forced runs until the scheduler is done."""
    config = config or AnalysisConfig()
    package_dir = Path(package_dir)
    try:
        manifest = PackageManifest.load(package_dir)
    except ManifestError:
        report = PackageReport(package_dir.name, "", skipped_reason=UNREADABLE, path=str(package_dir))
        return AnalysisResult(report, [])
    version = content_version(package_dir)
    pre = pre_analyze(package_dir, manifest, config)
    if pre.skipped:
        report = PackageReport(manifest.name, version, skipped_reason=pre.skipped)
        return AnalysisResult(report, [])
    commands = pre.commands
    run_lines = []
    runs_meta = []

    def record(plan, runs):
        runs_meta.append(
            {
                "plan": plan.to_dict(),
                "status": _run_status(runs),
                "stepsUsed": sum(r.outcome.steps for r in runs),
                "commands": [r.meta() for r in runs],
            }
        )
        run_lines.append(_run_line(manifest, version, plan, runs))

    result, runs = execute_plan(package_dir, commands, unintrusive_plan(), config)
    record(result.plan, runs)
    state = seed_from_unintrusive(result, config.max_runs)
    while (plan := next_plan(state)) is not None:
        result, runs = execute_plan(package_dir, commands, plan, config)
        record(plan, runs)
        absorb(state, result)
    report = build_report(manifest, version, state, runs_meta)
    return AnalysisResult(report, run_lines)


def prioritize(reports: list[PackageReport]) -> list[PackageReport]:
    """Most dangerous sink category first; then more hits; then name."""
    return sorted(
        reports,
        key=lambda r: (CATEGORY_RANK.get(r.best_category(), len(CATEGORY_RANK)), -len(r.hits), r.package),
    )
