"""Package manifests and the test-command execution strategy."""

from __future__ import annotations

import fnmatch
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

MANIFEST = "package.json"

DEFAULT_ALLOW = ("run test/*",)
DEFAULT_DENY = ("audit*", "install*")
# client-side or tooling packages are not worth analyzing for server-side gadgets
DEFAULT_NAME_KEYWORDS = ("react", "angular", "webpack", "jest", "babel", "mocha", "eslint", "@types/")


class ManifestError(Exception):
    pass


@dataclass
class PackageManifest:
    name: str
    main: str
    test_commands: list[str]
    keywords: list[str] = field(default_factory=list)
    root: Path = Path(".")

    @classmethod
    def load(cls, package_dir: str | Path) -> "PackageManifest":
        root = Path(package_dir)
        path = root / MANIFEST
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError) as exc:
            raise ManifestError(f"{path}: cannot read manifest: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON: {exc.msg}") from None
        if not isinstance(data, dict) or not isinstance(data.get("name"), str):
            raise ManifestError(f"{path}: manifest needs a string 'name'")
        scripts = data.get("scripts") or {}
        tests = scripts.get("test", []) if isinstance(scripts, dict) else []
        if isinstance(tests, str):
            # "npm audit && node test/test.js" style single string
            tests = [part.strip() for part in tests.split("&&") if part.strip()]
        if not isinstance(tests, list) or not all(isinstance(t, str) for t in tests):
            raise ManifestError(f"{path}: scripts.test must be a list of command strings")
        keywords = data.get("keywords") or []
        main = data.get("main", "index.mjs.txt")
        if not isinstance(main, str) or not _inside(root, main):
            raise ManifestError(f"{path}: main must be a path inside the package")
        for command in tests:
            target = command_target(command)
            if target is not None and not _inside(root, target):
                raise ManifestError(f"{path}: test command escapes the package: {command}")
        return cls(
            name=data["name"],
            main=main,
            test_commands=list(tests),
            keywords=[k for k in keywords if isinstance(k, str)],
            root=root,
        )


def _inside(root: Path, rel: str) -> bool:
    base = root.resolve()
    target = (base / rel).resolve()
    return target == base or base in target.parents


def content_version(package_dir: str | Path) -> str:
    """Stable content hash over every file in the package (path and bytes)."""
    root = Path(package_dir)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        if any(part.startswith(".") for part in rel.split("/")):
            continue
        digest.update(rel.encode("utf-8") + b"\0")
        digest.update(path.read_bytes() + b"\0")
    return "sha256:" + digest.hexdigest()[:16]


def _matches(pattern: str, command: str) -> bool:
    if any(ch in pattern for ch in "*?["):
        return fnmatch.fnmatchcase(command, pattern)
    return pattern in command


@dataclass
class ExecutionStrategy:
    allow: tuple = DEFAULT_ALLOW
    deny: tuple = DEFAULT_DENY
    name_keywords: tuple = DEFAULT_NAME_KEYWORDS

    def allowed(self, command: str) -> bool:
        command = command.strip()
        if any(_matches(p, command) for p in self.deny):
            return False
        return any(_matches(p, command) for p in self.allow)

    def allowed_commands(self, commands: list[str]) -> list[str]:
        return [c for c in commands if self.allowed(c)]

    def name_filtered(self, name: str) -> bool:
        lowered = name.lower()
        tokens = set(re.split(r"[^a-z0-9]+", lowered))
        for keyword in self.name_keywords:
            keyword = keyword.lower()
            if keyword.endswith("/"):
                if lowered.startswith(keyword):
                    return True
            elif keyword in tokens:
                return True
        return False


RUN_PREFIX = "run "


def command_target(command: str) -> str | None:
    """File executed by a ``run <file>`` command, or None for other commands."""
    command = command.strip()
    if command.startswith(RUN_PREFIX):
        target = command[len(RUN_PREFIX):].strip()
        return target or None
    return None
