from .analyze import (
    CATEGORY_RANK,
    DRY_RUN_FAILED,
    NAME_FILTERED,
    NO_HOST_API,
    NO_TESTS,
    SKIP_ORDER,
    UNREADABLE,
    AnalysisConfig,
    AnalysisResult,
    PackageReport,
    PreAnalysis,
    analyze_package,
    dedup_hits,
    execute_plan,
    pre_analyze,
    prioritize,
    run_command,
)
from .manifest import ExecutionStrategy, ManifestError, PackageManifest, content_version
from .sarif import dumps_sarif, export_sarif, validate_sarif
from .store import ResultsStore
from .verify import VerifyResult, parse_pollution_value, parse_pollutions, verify_with_pollution

__all__ = [
    "CATEGORY_RANK",
    "DRY_RUN_FAILED",
    "NAME_FILTERED",
    "NO_HOST_API",
    "NO_TESTS",
    "SKIP_ORDER",
    "UNREADABLE",
    "AnalysisConfig",
    "AnalysisResult",
    "ExecutionStrategy",
    "ManifestError",
    "PackageManifest",
    "PackageReport",
    "PreAnalysis",
    "ResultsStore",
    "VerifyResult",
    "analyze_package",
    "content_version",
    "dedup_hits",
    "dumps_sarif",
    "execute_plan",
    "export_sarif",
    "parse_pollution_value",
    "parse_pollutions",
    "pre_analyze",
    "prioritize",
    "run_command",
    "validate_sarif",
    "verify_with_pollution",
]
