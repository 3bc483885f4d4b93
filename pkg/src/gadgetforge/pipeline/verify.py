"""Replay a package with properties planted on the root prototype."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..frontend import FrontendError, parse_expression
from ..frontend import ast as A
from ..host import HostEnv
from ..interpreter import Interpreter, RunOutcome
from .analyze import AnalysisConfig
from .manifest import PackageManifest, command_target


@dataclass
class VerifyResult:
    command: str
    outcome: RunOutcome

    @property
    def effects(self) -> list[dict]:
        return self.outcome.effects

    def sink_effects(self) -> list[dict]:
        return [e for e in self.effects if e.get("category", "None") != "None" and "error" not in e]


def parse_pollution_value(text: str):
    """Pollution values are MiniJS literals or JSON arrays; anything else is taken as text."""
    text = text.strip()
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = None
        if isinstance(data, list):
            return data
    try:
        node = parse_expression(text)
    except FrontendError:
        return text
    if isinstance(node, A.Literal):
        return node.value
    if isinstance(node, A.Unary) and node.op == "-" and isinstance(node.operand, A.Literal):
        if isinstance(node.operand.value, float):
            return -node.operand.value
    return text


def parse_pollutions(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"pollution must look like key=value: {item!r}")
        out[key.strip()] = parse_pollution_value(value)
    return out


def verify_with_pollution(
    package_dir, pollutions: dict, command: str | None = None, config: AnalysisConfig | None = None
) -> VerifyResult:
    """Run ``command`` plainly after setting each pollution on the root prototype."""
    config = config or AnalysisConfig()
    package_dir = Path(package_dir)
    if command is None:
        manifest = PackageManifest.load(package_dir)
        allowed = config.strategy.allowed_commands(manifest.test_commands)
        if not allowed:
            raise ValueError(f"{manifest.name}: no allowed test command to verify with")
        command = allowed[0]
    interp = Interpreter(package_dir, HostEnv(config.special_table), None, config.step_budget)
    for key, value in pollutions.items():
        interp.root.set_own(key, interp.to_plain_object(value))
    target = command_target(command)
    if target is None:
        raise ValueError(f"unsupported command: {command}")
    return VerifyResult(command, interp.run_file(target))
