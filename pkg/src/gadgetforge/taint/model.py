"""Taint wrapper, provenance records and the deep unwrap used at host boundaries."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from ..frontend.ast import SourceLocation
from ..interpreter.values import (
    UNDEFINED,
    JSArray,
    JSFunction,
    JSObject,
    NativeFunction,
    Tainted,
    is_callable,
)

# type tags
UNKNOWN = "Unknown"
TEXT = "Text"
NUMBER = "Number"
BOOLEAN = "Boolean"
ARRAY = "Array"
OBJECT = "Object"
FUNCTION = "Function"
TYPE_TAGS = (UNKNOWN, TEXT, NUMBER, BOOLEAN, ARRAY, OBJECT, FUNCTION)

TYPEOF_TO_TAG = {
    "string": TEXT,
    "number": NUMBER,
    "boolean": BOOLEAN,
    "object": OBJECT,
    "function": FUNCTION,
}

IMMEDIATE = "Immediate"
DELAYED = "DelayedConditional"

# flow step kinds
READ = "Read"
BINARY_OP = "BinaryOp"
UNARY_OP = "UnaryOp"
COERCION = "Coercion"
BUILTIN = "BuiltinPropagation"
CONDITION = "ConditionTest"
SINK_ARG = "SinkArg"

MAX_FLOW = 64


@dataclass(frozen=True, order=True)
class SourceRecord:
    property: str
    loc: SourceLocation
    base_has_root_proto: bool = True
    injection_mode: str = IMMEDIATE

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "loc": self.loc.to_dict(),
            "baseHasRootProto": self.base_has_root_proto,
            "injectionMode": self.injection_mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SourceRecord":
        return cls(d["property"], SourceLocation.from_dict(d["loc"]), d["baseHasRootProto"], d["injectionMode"])


@dataclass(frozen=True)
class FlowStep:
    kind: str
    detail: str
    loc: SourceLocation

    def to_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail, "loc": self.loc.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "FlowStep":
        return cls(d["kind"], d["detail"], SourceLocation.from_dict(d["loc"]))


def merge_flows(*flows: tuple) -> tuple:
    """Concatenate flows, dropping repeated steps and capping the length."""
    seen = set()
    out = []
    for flow in flows:
        for step in flow:
            if step not in seen:
                seen.add(step)
                out.append(step)
    if len(out) > MAX_FLOW:
        out = out[: MAX_FLOW // 2] + out[-(MAX_FLOW // 2 - 1):]
    return tuple(out)


def merge_sources(*groups) -> tuple:
    seen = {}
    for group in groups:
        for s in group:
            seen.setdefault((s.property, s.loc), s)
    return tuple(seen.values())


_ids = itertools.count(1)


@dataclass(eq=False)
class TaintValue(Tainted):
    """A value standing in for a possibly polluted property read."""

    underlying: Any
    inferred_type: str
    sources: tuple
    flow: tuple
    # taints injected directly at a source; candidate overrides apply to these
    roots: tuple = ()
    # set on the result of typeof: the taint whose type was inspected
    typeof_of: "TaintValue | None" = None
    # hint that replaced an absent underlying value during coercion
    defaulted: str | None = None
    taint_id: int = field(default_factory=lambda: next(_ids))

    def __post_init__(self) -> None:
        if isinstance(self.underlying, Tainted):
            self.underlying = self.underlying.underlying
        if not self.roots:
            self.roots = (self,)

    @property
    def source(self) -> SourceRecord:
        return self.sources[0]

    @property
    def properties(self) -> frozenset:
        return frozenset(s.property for s in self.sources)

    def refine(self, tag: str) -> None:
        """Move the inferred type to ``tag``; never back to Unknown."""
        if tag != UNKNOWN:
            self.inferred_type = tag

    def __repr__(self) -> str:
        props = ",".join(sorted(self.properties))
        return f"Tainted#{self.taint_id}({self.underlying!r}:{self.inferred_type} <- {props})"


def derive(parents: list, underlying: Any, step: FlowStep | None, tag: str | None = None) -> TaintValue:
    """New taint computed from ``parents``: sources and flows merge, step appended."""
    sources = merge_sources(*(p.sources for p in parents))
    flows = []
    for p in parents:
        flows.append(p.flow)
        if p.defaulted:
            flows.append((FlowStep(COERCION, p.defaulted, step.loc if step else p.source.loc),))
    if step is not None:
        flows.append((step,))
    roots = tuple(dict.fromkeys(r for p in parents for r in p.roots))
    return TaintValue(
        underlying,
        tag if tag is not None else type_of_value(underlying),
        sources,
        merge_flows(*flows),
        roots=roots,
    )


def type_of_value(value: Any) -> str:
    if isinstance(value, Tainted):
        value = value.underlying
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, float):
        return NUMBER
    if isinstance(value, str):
        return TEXT
    if isinstance(value, JSArray):
        return ARRAY
    if is_callable(value):
        return FUNCTION
    if isinstance(value, JSObject):
        return OBJECT
    return UNKNOWN


def default_value(tag: str, interp) -> Any:
    """Neutral stand-in for an absent value of the given type (Unknown acts as Text)."""
    if tag in (TEXT, UNKNOWN):
        return ""
    if tag == NUMBER:
        return 0.0
    if tag == BOOLEAN:
        return False
    if tag == ARRAY:
        return interp.new_array()
    if tag == OBJECT:
        return interp.new_object()
    if tag == FUNCTION:
        return NativeFunction(interp.root, "noop", lambda i, this, args, node: UNDEFINED)
    raise ValueError(f"unknown type tag {tag}")


HINT_TO_TAG = {"string": TEXT, "number": NUMBER}


def hint_tag(hint: str, taint: TaintValue) -> str:
    if hint in HINT_TO_TAG:
        return HINT_TO_TAG[hint]
    if hint == "boolean":
        return BOOLEAN
    return taint.inferred_type


# -- unwrapping ----------------------------------------------------------


def unwrap_deep(value: Any, max_depth: int = 4) -> tuple[Any, list]:
    """Replace every wrapped value reachable within ``max_depth`` by its underlying.

    Returns ``(plain, found)`` where ``found`` lists ``(taint, path)`` pairs.
    Containers holding no wrapped value are returned as-is (same identity);
    the others are copied with the same prototype.
    """
    found: list = []
    plain = _unwrap(value, max_depth, (), found, set())
    return plain, found


def _unwrap(value, depth, path, found, active):
    if isinstance(value, Tainted):
        found.append((value, path))
        # the underlying value may itself be a container holding wrappers
        return _unwrap(value.underlying, depth, path, found, active)
    if depth <= 0 or not isinstance(value, JSObject) or isinstance(value, (JSFunction, NativeFunction)):
        return value
    if id(value) in active:
        return value
    active.add(id(value))
    try:
        if isinstance(value, JSArray):
            items = [_unwrap(x, depth - 1, path + (i,), found, active) for i, x in enumerate(value.items)]
            props = {k: _unwrap(v, depth - 1, path + (k,), found, active) for k, v in value.props.items()}
            if all(a is b for a, b in zip(items, value.items)) and all(props[k] is v for k, v in value.props.items()):
                return value
            copy = JSArray(value.proto, items)
            copy.props = props
            return copy
        props = {k: _unwrap(v, depth - 1, path + (k,), found, active) for k, v in value.props.items()}
        if all(props[k] is v for k, v in value.props.items()):
            return value
        return JSObject(value.proto, props)
    finally:
        active.discard(id(value))


def find_taints(value: Any, max_depth: int) -> list:
    """Wrapped values reachable from ``value`` without copying anything."""
    return unwrap_deep(value, max_depth)[1]


def contains_taint(value: Any, max_depth: int = 4) -> bool:
    return bool(find_taints(value, max_depth))
