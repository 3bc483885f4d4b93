"""Observations produced by one instrumented run: tainted branches and sink hits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..frontend.ast import SourceLocation
from .model import FlowStep, SourceRecord

STANDARD = "Standard"
NAME_MATCHED = "NameMatched"
SPECIAL = "Special"
MODES = (STANDARD, NAME_MATCHED, SPECIAL)

SARIF_MODE = {STANDARD: "standard", NAME_MATCHED: "name-matched", SPECIAL: "special"}


@dataclass(frozen=True)
class BranchRecord:
    loc: SourceLocation
    properties: frozenset
    natural: bool
    run: int = 0

    @property
    def key(self) -> tuple:
        return (self.loc, self.properties, self.natural)

    def to_dict(self) -> dict:
        return {
            "loc": self.loc.to_dict(),
            "properties": sorted(self.properties),
            "naturalOutcome": self.natural,
            "discoveredInRun": self.run,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BranchRecord":
        return cls(SourceLocation.from_dict(d["loc"]), frozenset(d["properties"]), d["naturalOutcome"], d["discoveredInRun"])


@dataclass(frozen=True)
class FlowKey:
    source_property: str
    source_loc: SourceLocation | None
    sink: str
    sink_loc: SourceLocation
    mode: str

    def sort_key(self) -> tuple:
        loc = self.source_loc
        return (
            self.sink_loc,
            self.sink,
            self.mode,
            self.source_property,
            (loc.file, loc.line, loc.column, loc.byte_start, loc.byte_end) if loc else ("", 0, 0, 0, 0),
        )


@dataclass(frozen=True)
class SinkHit:
    mode: str
    sink: str
    category: str
    sink_loc: SourceLocation
    source: SourceRecord | None
    sources: tuple
    flow: tuple
    arg_path: tuple
    run: int = 0
    command: str = ""
    forced_props: tuple = ()
    call_stack: tuple = ()
    entry: str = ""
    only_from_tests: bool = False
    label: str = ""  # pollutable group for special hits

    @property
    def flow_key(self) -> FlowKey:
        if self.source is not None:
            return FlowKey(self.source.property, self.source.loc, self.sink, self.sink_loc, self.mode)
        return FlowKey(self.label, None, self.sink, self.sink_loc, self.mode)

    def occurrence(self) -> dict:
        return {
            "run": self.run,
            "command": self.command,
            "forcedProps": list(self.forced_props),
            "entry": self.entry,
            "callStack": list(self.call_stack),
        }

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "sink": self.sink,
            "category": self.category,
            "sinkLoc": self.sink_loc.to_dict(),
            "source": self.source.to_dict() if self.source else None,
            "sources": [s.to_dict() for s in self.sources],
            "flow": [s.to_dict() for s in self.flow],
            "argPath": [_jsonable(p) for p in self.arg_path],
            "run": self.run,
            "command": self.command,
            "forcedProps": list(self.forced_props),
            "callStack": list(self.call_stack),
            "entry": self.entry,
            "sinkReachedOnlyFromTestFiles": self.only_from_tests,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SinkHit":
        return cls(
            mode=d["mode"],
            sink=d["sink"],
            category=d["category"],
            sink_loc=SourceLocation.from_dict(d["sinkLoc"]),
            source=SourceRecord.from_dict(d["source"]) if d["source"] else None,
            sources=tuple(SourceRecord.from_dict(s) for s in d["sources"]),
            flow=tuple(FlowStep.from_dict(s) for s in d["flow"]),
            arg_path=tuple(d["argPath"]),
            run=d["run"],
            command=d["command"],
            forced_props=tuple(d["forcedProps"]),
            call_stack=tuple(d["callStack"]),
            entry=d["entry"],
            only_from_tests=d["sinkReachedOnlyFromTestFiles"],
            label=d.get("label", ""),
        )


def _jsonable(part: Any) -> Any:
    return part if isinstance(part, (str, int)) else str(part)


@dataclass
class RunPlan:
    index: int
    mode: str  # "Unintrusive" | "Forced"
    forced_props: frozenset = frozenset()
    candidates: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.forced_props, frozenset):
            object.__setattr__(self, "forced_props", frozenset(self.forced_props))

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "mode": self.mode,
            "forcedProps": sorted(self.forced_props),
            "candidateValues": {
                k: {"value": _candidate_json(v), "type": t} for k, (v, t) in sorted(self.candidates.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunPlan":
        cands = {k: (_candidate_value(v["value"]), v["type"]) for k, v in d["candidateValues"].items()}
        return cls(d["index"], d["mode"], frozenset(d["forcedProps"]), cands)


UNINTRUSIVE = "Unintrusive"
FORCED = "Forced"


class _TypeDefault:
    """Candidate placeholder: use the default value of the candidate's type."""

    def __repr__(self) -> str:
        return "<type default>"

    def __reduce__(self):
        return (_type_default, ())


TYPE_DEFAULT = _TypeDefault()


def _type_default() -> _TypeDefault:
    return TYPE_DEFAULT


def _candidate_json(value: Any) -> Any:
    from ..interpreter.values import UNDEFINED

    if value is UNDEFINED:
        return {"$undefined": True}
    if value is TYPE_DEFAULT:
        return {"$typeDefault": True}
    return value


def _candidate_value(value: Any) -> Any:
    from ..interpreter.values import UNDEFINED

    if isinstance(value, dict) and value.get("$undefined"):
        return UNDEFINED
    if isinstance(value, dict) and value.get("$typeDefault"):
        return TYPE_DEFAULT
    return value
