"""SARIF 2.1.0 export and a structural validator for the subset we emit."""

from __future__ import annotations

import json

from .. import __version__
from ..taint.records import SARIF_MODE
from .analyze import PackageReport

SARIF_VERSION = "2.1.0"
SARIF_SCHEMA = "https://json.schemastore.org/sarif-2.1.0.json"
TOOL_NAME = "gadgetforge"

LEVEL = {"ACE": "error", "ACI": "error", "LFI": "error", "FileWrite": "warning", "FileRead": "warning", "Network": "warning"}


def _location(loc: dict, message: str | None = None) -> dict:
    out = {
        "physicalLocation": {
            "artifactLocation": {"uri": loc["file"]},
            "region": {
                "startLine": loc["line"],
                "startColumn": loc["column"],
                "byteOffset": loc["byteStart"],
                "byteLength": loc["byteEnd"] - loc["byteStart"],
            },
        }
    }
    if message is not None:
        out["message"] = {"text": message}
    return out


def _step_message(step: dict) -> str:
    kind, detail = step["kind"], step["detail"]
    if kind == "Read":
        return f"read of '{detail}'"
    if kind == "SinkArg":
        return f"argument to {detail}"
    return f"{kind} {detail}"


def rule_id(hit: dict) -> str:
    return f"{hit['category']}/{SARIF_MODE[hit['mode']]}"


def export_sarif(report: PackageReport) -> dict:
    results = []
    rules: dict[str, dict] = {}
    for hit in report.hits:
        rid = rule_id(hit)
        rules.setdefault(
            rid,
            {
                "id": rid,
                "shortDescription": {"text": f"{hit['category']} sink reached ({SARIF_MODE[hit['mode']]} detection)"},
            },
        )
        if hit["source"] is not None:
            src = hit["source"]["property"]
            text = f"Property '{src}' read from the root prototype reaches {hit['sink']}"
        else:
            text = f"{hit['sink']} called with pollutable options ({hit['label']})"
        flow_locations = [
            {"location": _location(step["loc"], _step_message(step))} for step in hit["flow"]
        ]
        results.append(
            {
                "ruleId": rid,
                "level": LEVEL.get(hit["category"], "note"),
                "message": {"text": text},
                "locations": [_location(hit["sinkLoc"])],
                "codeFlows": [{"threadFlows": [{"locations": flow_locations}]}],
                "properties": {
                    "mode": hit["mode"],
                    "sources": sorted({s["property"] for s in hit["sources"]}),
                    "argPath": hit["argPath"],
                    "occurrences": len(hit.get("occurrences", [])),
                    "sinkReachedOnlyFromTestFiles": hit["sinkReachedOnlyFromTestFiles"],
                },
            }
        )
    return {
        "$schema": SARIF_SCHEMA,
        "version": SARIF_VERSION,
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": TOOL_NAME,
                        "version": __version__,
                        "rules": [rules[k] for k in sorted(rules)],
                    }
                },
                "properties": {"package": report.package, "packageVersion": report.version},
                "results": results,
            }
        ],
    }


def dumps_sarif(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _check_location(loc, where: str, errors: list) -> None:
    phys = loc.get("physicalLocation") if isinstance(loc, dict) else None
    if not isinstance(phys, dict):
        errors.append(f"{where}: missing physicalLocation")
        return
    art = phys.get("artifactLocation")
    if not isinstance(art, dict) or not isinstance(art.get("uri"), str):
        errors.append(f"{where}: missing artifactLocation.uri")
    region = phys.get("region")
    if region is not None:
        line = region.get("startLine") if isinstance(region, dict) else None
        if not isinstance(line, int) or line < 1:
            errors.append(f"{where}: region.startLine must be a positive integer")


def validate_sarif(doc) -> list[str]:
    """Structural problems in ``doc``; an empty list means valid."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        return ["document is not an object"]
    if doc.get("version") != SARIF_VERSION:
        errors.append("version must be 2.1.0")
    runs = doc.get("runs")
    if not isinstance(runs, list) or not runs:
        return errors + ["runs must be a non-empty array"]
    for r, run in enumerate(runs):
        driver = (run.get("tool") or {}).get("driver") if isinstance(run, dict) else None
        if not isinstance(driver, dict) or not isinstance(driver.get("name"), str) or not driver["name"]:
            errors.append(f"runs[{r}].tool.driver.name missing")
        results = run.get("results") if isinstance(run, dict) else None
        if not isinstance(results, list):
            errors.append(f"runs[{r}].results must be an array")
            continue
        for i, res in enumerate(results):
            where = f"runs[{r}].results[{i}]"
            if not isinstance(res, dict):
                errors.append(f"{where} is not an object")
                continue
            if not isinstance(res.get("ruleId"), str):
                errors.append(f"{where}.ruleId missing")
            msg = res.get("message")
            if not isinstance(msg, dict) or not isinstance(msg.get("text"), str) or not msg["text"]:
                errors.append(f"{where}.message.text missing")
            locs = res.get("locations")
            if not isinstance(locs, list) or not locs:
                errors.append(f"{where}.locations must be a non-empty array")
            else:
                for j, loc in enumerate(locs):
                    _check_location(loc, f"{where}.locations[{j}]", errors)
            for f, flow in enumerate(res.get("codeFlows", [])):
                threads = flow.get("threadFlows") if isinstance(flow, dict) else None
                if not isinstance(threads, list) or not threads:
                    errors.append(f"{where}.codeFlows[{f}].threadFlows must be a non-empty array")
                    continue
                for t, thread in enumerate(threads):
                    tlocs = thread.get("locations") if isinstance(thread, dict) else None
                    if not isinstance(tlocs, list) or not tlocs:
                        errors.append(f"{where}.codeFlows[{f}].threadFlows[{t}].locations must be non-empty")
                        continue
                    for k, tl in enumerate(tlocs):
                        _check_location(
                            tl.get("location") if isinstance(tl, dict) else None,
                            f"{where}.codeFlows[{f}].threadFlows[{t}].locations[{k}]",
                            errors,
                        )
    return errors
