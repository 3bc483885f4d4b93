"""Shared test helpers: running MiniJS snippets and small on-disk packages."""

from __future__ import annotations

import json
from pathlib import Path

from gadgetforge.frontend import parse_source
from gadgetforge.host import HostEnv
from gadgetforge.interpreter import Interpreter, PassThroughHooks
from gadgetforge.taint import RunPlan, TaintAnalysis
from gadgetforge.taint.records import FORCED

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
GADGETS = sorted(p.parent.name for p in CORPUS.glob("*/gadget.json"))


def run(source: str, hooks=None, root: Path | None = None, file: str = "main.mjs.txt", budget: int = 200_000):
    interp = Interpreter(root or ROOT, HostEnv(), hooks, budget)
    outcome = interp.run_program(parse_source(source, file))
    return outcome, interp


def plain(source: str, **kw):
    return run(source, PassThroughHooks(), **kw)[0]


def tainted(source: str, forced=(), candidates=None, **kw):
    """Run under the taint analysis; returns (outcome, observations, interp)."""
    plan = RunPlan(1, FORCED, tuple(sorted(forced)), candidates or {}) if forced else None
    hooks = TaintAnalysis(plan, "run main.mjs.txt")
    outcome, interp = run(source, hooks, **kw)
    return outcome, hooks.obs, interp


def write_package(root: Path, files: dict, tests=("run test/test.mjs.txt",), name: str = "pkg", keywords=()) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    manifest = {"name": name, "main": "index.mjs.txt", "keywords": list(keywords), "scripts": {"test": list(tests)}}
    (root / "package.json").write_text(json.dumps(manifest))
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return root


def gadget(name: str) -> dict:
    return json.loads((CORPUS / name / "gadget.json").read_text())
