"""Taint-injecting hook set: sources, propagation, branch recording and sink detection."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from ..frontend import ast as A
from ..interpreter.hooks import CallInfo, HookSet, Invoke, Iterate, PropertyGet, PropertySet, is_nullish
from ..interpreter.values import (
    UNDEFINED,
    HostFunctionRef,
    JSArray,
    JSFunction,
    JSObject,
    NativeFunction,
    Tainted,
    is_callable,
)
from .model import (
    ARRAY,
    BINARY_OP,
    BUILTIN,
    CONDITION,
    DELAYED,
    FUNCTION,
    IMMEDIATE,
    NUMBER,
    OBJECT,
    READ,
    SINK_ARG,
    TEXT,
    TYPEOF_TO_TAG,
    UNARY_OP,
    UNKNOWN,
    FlowStep,
    SourceRecord,
    TaintValue,
    default_value,
    derive,
    find_taints,
    hint_tag,
    merge_flows,
    type_of_value,
    unwrap_deep,
)
from .records import (
    FORCED,
    NAME_MATCHED,
    SPECIAL,
    STANDARD,
    TYPE_DEFAULT,
    UNINTRUSIVE,
    BranchRecord,
    RunPlan,
    SinkHit,
)

# reads of these keys never become sources; they are runtime plumbing, not
# plausible pollution targets
IGNORED_KEYS = frozenset(
    {"toString", "valueOf", "constructor", "prototype", "then", "length", "Symbol.iterator"}
)

TEXT_METHODS = frozenset(
    {
        "substring", "substr", "toUpperCase", "toLowerCase", "trim", "startsWith",
        "endsWith", "charAt", "charCodeAt", "replace", "split", "padStart", "padEnd",
        "repeat", "match",
    }
)
ARRAY_METHODS = frozenset({"push", "pop", "shift", "unshift", "join", "map", "forEach", "filter", "reduce", "splice"})

# built-ins whose result carries the taint of receiver or arguments
PROPAGATING_NATIVES = frozenset({"join", "concat", "slice", "substring", "replace", "split"})
PROPAGATING_HOST = frozenset({("util", "format")})
PROPAGATION_DEPTH = 2

NAME_MATCH = re.compile(r"exec|spawn|fork", re.IGNORECASE)
EQUALITY_OPS = ("==", "===", "!=", "!==")


@dataclass
class _LogicalFrame:
    node: Any
    kind: str
    pending: SourceRecord | None = None
    test_value: Any = UNDEFINED
    decision: bool | None = None


@dataclass
class LookupLog:
    key: str
    depth: int | None
    hits_root: bool
    injected: bool
    loc: Any


@dataclass
class RunObservations:
    records: list = field(default_factory=list)
    hits: list = field(default_factory=list)
    candidates: dict = field(default_factory=dict)
    lookups: list = field(default_factory=list)
    intermediate_hits: list = field(default_factory=list)
    taints: list = field(default_factory=list)


class TaintAnalysis(HookSet):
    """Hook set implementing the taint analysis for one run of one command.

    ``plan`` selects unintrusive or forced behavior. Results accumulate in
    ``self.obs`` and can be shared across the commands of the same run.
    """

    def __init__(
        self,
        plan: RunPlan | None = None,
        command: str = "",
        obs: RunObservations | None = None,
        log_lookups: bool = False,
    ):
        self.plan = plan or RunPlan(0, UNINTRUSIVE)
        self.command = command
        self.obs = obs if obs is not None else RunObservations()
        self.log_lookups = log_lookups
        self.stack: list[_LogicalFrame] = []
        self.overrides: dict[str, tuple] = {}
        self._record_keys = {r.key for r in self.obs.records}
        self._hit_keys: set = set()

    @property
    def forced(self) -> bool:
        return self.plan.mode == FORCED

    # -- sources --------------------------------------------------------

    def new_source(self, key: str, node, mode: str, underlying: Any = UNDEFINED) -> TaintValue:
        tag = type_of_value(underlying)
        if key in self.overrides:
            underlying, tag = self.overrides[key]
        record = SourceRecord(key, node.loc, True, mode)
        taint = TaintValue(underlying, tag, (record,), (FlowStep(READ, key, node.loc),))
        self.obs.taints.append(taint)
        return taint

    def on_property_read(self, base, key, lookup, node):
        is_source = not lookup.found and lookup.hits_root and key not in IGNORED_KEYS
        if self.log_lookups:
            self.obs.lookups.append(LookupLog(key, lookup.depth, lookup.hits_root, is_source, node.loc))
        if lookup.found:
            if lookup.depth and lookup.holder is not self.interp.root and lookup.holder is not self.interp.array_proto:
                self.obs.intermediate_hits.append((key, node.loc, lookup.depth))
            return lookup.value
        if not is_source:
            return lookup.value
        top = self.stack[-1] if self.stack else None
        if (
            top is not None
            and top.kind in ("LogicalOr", "NullishCoalesce")
            and top.node.left is node
            and top.pending is None
            and key not in self.overrides
        ):
            # conditional assignment: wait for the fallback value
            top.pending = SourceRecord(key, node.loc, True, DELAYED)
            return UNDEFINED
        return self.new_source(key, node, IMMEDIATE)

    # -- logical expressions and conditionals ---------------------------

    def on_logical_start(self, kind, node):
        self.stack.append(_LogicalFrame(node, kind))

    def on_logical_end(self, kind, node, value):
        frame = self.stack.pop()
        assert frame.node is node, "logical hook nesting mismatch"
        if frame.pending is not None:
            return self._finish_delayed(frame.pending, value)
        test = frame.test_value
        if not isinstance(test, TaintValue) or isinstance(value, Tainted):
            return value
        if kind in ("LogicalOr", "NullishCoalesce") and frame.decision is False:
            # the tainted left side selected the fallback
            op = "||" if kind == "LogicalOr" else "??"
            return derive([test], value, FlowStep(CONDITION, op, node.loc), type_of_value(value))
        if kind == "Ternary" and frame.decision is False and is_nullish(test.underlying):
            return derive([test], value, FlowStep(CONDITION, "?:", node.loc), type_of_value(value))
        return value

    def _finish_delayed(self, record: SourceRecord, value: Any) -> TaintValue:
        read = FlowStep(READ, record.property, record.loc)
        if isinstance(value, TaintValue):
            taint = TaintValue(
                value.underlying,
                type_of_value(value.underlying),
                (record,) + tuple(s for s in value.sources if s != record),
                merge_flows((read,), value.flow),
            )
        else:
            taint = TaintValue(value, type_of_value(value), (record,), (read,))
        self.obs.taints.append(taint)
        return taint

    def on_condition_test(self, value, node):
        frame = self.stack[-1] if self.stack else None
        if frame is not None and not (frame.node is node or (frame.kind == "Ternary" and frame.node.test is node)):
            frame = None
        if not isinstance(value, TaintValue):
            decision = super().on_condition_test(value, node)
        else:
            decision = self.tainted_condition(value, node)
        if frame is not None:
            frame.test_value = value
            frame.decision = decision
        return decision

    def natural_outcome(self, taint: TaintValue, node) -> bool:
        raw = taint.underlying
        if node.kind == "NullishCoalesce":
            return not is_nullish(raw)
        return self.interp.truthy(raw)

    def tainted_condition(self, taint: TaintValue, node) -> bool:
        natural = self.natural_outcome(taint, node)
        props = taint.properties
        record = BranchRecord(node.loc, props, natural, self.plan.index)
        if record.key not in self._record_keys:
            self._record_keys.add(record.key)
            self.obs.records.append(record)
        if self.forced and props & self.plan.forced_props:
            self.apply_candidates(taint, props & self.plan.forced_props)
            return not natural
        return natural

    def candidate_for(self, prop: str):
        if prop in self.plan.candidates:
            return self.plan.candidates[prop]
        return self.obs.candidates.get(prop)

    def apply_candidates(self, taint: TaintValue, props) -> None:
        for prop in sorted(props):
            cand = self.candidate_for(prop)
            if cand is None:
                continue
            value, tag = cand
            if value is TYPE_DEFAULT:
                value = default_value(tag, self.interp)
            self.overrides[prop] = (value, tag)
            for root in taint.roots:
                if root.source.property == prop:
                    root.underlying = value
                    root.refine(tag)

    # -- operators ------------------------------------------------------

    def on_coerce(self, value, hint):
        if not isinstance(value, TaintValue):
            return value
        raw = value.underlying
        if hint == "raw" or hint == "boolean":
            return raw
        # rule 4: the consuming operation tells us the expected type
        if hint in ("string", "number") and value.inferred_type == UNKNOWN:
            value.refine(hint_tag(hint, value))
        if raw is not UNDEFINED:
            return raw
        tag = hint_tag(hint, value)
        value.defaulted = hint
        return default_value(tag, self.interp)

    def on_binary(self, op, left, right, raw, node):
        lt = isinstance(left, TaintValue)
        rt = isinstance(right, TaintValue)
        if not (lt or rt):
            return raw
        if op == "+":
            # rule 2: concatenation with text makes an unknown operand text
            for mine, other in ((left, right), (right, left)):
                if isinstance(mine, TaintValue) and mine.inferred_type == UNKNOWN and self._is_text(other):
                    mine.refine(TEXT)
        if op in EQUALITY_OPS:
            self._record_comparison(left, node.right, right)
            self._record_comparison(right, node.left, left)
        parents = [t for t in (left, right) if isinstance(t, TaintValue)]
        result = derive(parents, raw, FlowStep(BINARY_OP, op, node.loc))
        for p in parents:
            p.defaulted = None
        return result

    def _is_text(self, value) -> bool:
        if isinstance(value, TaintValue):
            return value.inferred_type == TEXT
        return isinstance(value, str)

    def _record_comparison(self, taint, other_node, other_value) -> None:
        # rule 6 (and rule 5 via typeof results): comparisons against literals
        if not isinstance(taint, TaintValue) or not isinstance(other_node, A.Literal):
            return
        literal = other_node.value
        if taint.typeof_of is not None:
            tag = TYPEOF_TO_TAG.get(literal) if isinstance(literal, str) else None
            if tag is None:
                return
            for prop in sorted(taint.typeof_of.properties):
                self.obs.candidates.setdefault(prop, (TYPE_DEFAULT, tag))
            return
        tag = type_of_value(literal)
        for prop in sorted(taint.properties):
            self.obs.candidates.setdefault(prop, (literal, tag if tag != UNKNOWN else TEXT))

    def on_unary(self, op, operand, raw, node):
        if not isinstance(operand, TaintValue):
            return raw
        result = derive([operand], raw, FlowStep(UNARY_OP, op, node.loc))
        operand.defaulted = None
        if op == "typeof":
            result.typeof_of = operand
        return result

    # -- wrapper operations ---------------------------------------------

    def on_taint_operation(self, taint, op, node):
        interp = self.interp
        raw = taint.underlying
        if isinstance(op, PropertyGet):
            return self._taint_get(taint, op.key, node)
        if isinstance(op, PropertySet):
            if isinstance(raw, JSObject):
                interp.write_member(raw, op.key, op.value, node)
            elif is_nullish(raw):
                taint.refine(ARRAY if op.key.isdigit() else OBJECT)
            return op.value
        if isinstance(op, Invoke):
            if is_callable(raw):
                return interp.call_value(raw, op.this, list(op.args), node, CallInfo(""))
            return derive([taint], UNDEFINED, FlowStep(BUILTIN, "call", node.loc), UNKNOWN)
        if isinstance(op, Iterate):
            if is_nullish(raw) or isinstance(raw, JSArray):
                taint.refine(ARRAY)
            items = interp.iterate(raw, node) if not is_nullish(raw) else []
            step = FlowStep(BUILTIN, "iterate", node.loc)
            return [x if isinstance(x, (Tainted, JSObject)) else derive([taint], x, step) for x in items]
        raise TypeError(f"unknown taint operation {op!r}")

    def _taint_get(self, taint: TaintValue, key: str, node):
        raw = taint.underlying
        step = FlowStep(READ, key, node.loc)
        if is_nullish(raw):
            # rule 3: the member being used hints at the expected type
            if key in TEXT_METHODS:
                taint.refine(TEXT)
            elif key in ARRAY_METHODS:
                taint.refine(ARRAY)
            tag = FUNCTION if key in TEXT_METHODS or key in ARRAY_METHODS else UNKNOWN
            return derive([taint], UNDEFINED, step, tag)
        value = self.interp.read_member(raw, key, node)
        if isinstance(value, Tainted) or isinstance(value, JSObject) or value is UNDEFINED:
            return value
        return derive([taint], value, step)

    # -- calls and sinks ------------------------------------------------

    def on_call_pre(self, callee, args, node, info: CallInfo):
        if isinstance(callee, JSFunction):
            name = info.name or callee.name
            matched = name if NAME_MATCH.search(name or "") else None
            if matched is None and callee.name and NAME_MATCH.search(callee.name):
                matched = callee.name
            if matched is not None:
                found = []
                for i, arg in enumerate(args):
                    found.extend((t, (i,) + path) for t, path in find_taints(arg, 4))
                if found:
                    self.record_hits(NAME_MATCHED, f"mock:{matched}", "ACI", node, found)
        return args

    def on_call_post(self, callee, args, raw, node, info: CallInfo):
        if isinstance(raw, Tainted):
            return raw
        name = None
        if isinstance(callee, NativeFunction) and callee.name in PROPAGATING_NATIVES:
            name = callee.name
        elif isinstance(callee, HostFunctionRef) and (callee.spec.module, callee.spec.name) in PROPAGATING_HOST:
            name = f"{callee.spec.module}.{callee.spec.name}"
        if name is None:
            return raw
        found = find_taints(info.this, PROPAGATION_DEPTH) if info.this is not UNDEFINED else []
        for arg in args:
            found.extend(find_taints(arg, PROPAGATION_DEPTH))
        if not found:
            return raw
        parents = list(dict.fromkeys(t for t, _ in found))
        return derive(parents, raw, FlowStep(BUILTIN, name, node.loc))

    def on_host_call(self, spec, plain_args, taints, special, node):
        sink = f"{spec.module}.{spec.name}"
        if taints and spec.category != "None":
            self.record_hits(STANDARD, sink, spec.category, node, taints)
        if special is not None:
            self.record_special(sink, spec.category, node, special, taints)

    def _context(self):
        interp = self.interp
        frames = interp.call_stack()
        stack = tuple(f"{f.name or '<anonymous>'}@{f.call_loc}" for f in frames)
        entry = str(frames[0].call_loc) if frames and frames[0].call_loc else ""
        return frames, stack, entry

    def _only_tests(self, frames, node) -> bool:
        files = {f.file for f in frames} | {node.loc.file}
        return all(f.startswith("test/") for f in files)

    def record_hits(self, mode: str, sink: str, category: str, node, found: list) -> None:
        frames, stack, entry = self._context()
        only_tests = self._only_tests(frames, node)
        for taint, path in found:
            sink_step = FlowStep(SINK_ARG, sink, node.loc)
            flow = merge_flows(taint.flow, (sink_step,))
            if flow[-1] != sink_step:
                flow = flow + (sink_step,)
            for source in taint.sources:
                hit = SinkHit(
                    mode=mode,
                    sink=sink,
                    category=category,
                    sink_loc=node.loc,
                    source=source,
                    sources=taint.sources,
                    flow=flow,
                    arg_path=path,
                    run=self.plan.index,
                    command=self.command,
                    forced_props=tuple(sorted(self.plan.forced_props)),
                    call_stack=stack,
                    entry=entry,
                    only_from_tests=only_tests,
                )
                self._add_hit(hit)

    def record_special(self, sink, category, node, special, taints) -> None:
        frames, stack, entry = self._context()
        arg_index, group = special
        sources = tuple(dict.fromkeys(s for t, _ in taints for s in t.sources))
        hit = SinkHit(
            mode=SPECIAL,
            sink=sink,
            category=category,
            sink_loc=node.loc,
            source=None,
            sources=sources,
            flow=(FlowStep(SINK_ARG, sink, node.loc),),
            arg_path=(arg_index,) + tuple(group),
            run=self.plan.index,
            command=self.command,
            forced_props=tuple(sorted(self.plan.forced_props)),
            call_stack=stack,
            entry=entry,
            only_from_tests=self._only_tests(frames, node),
            label="+".join(group),
        )
        self._add_hit(hit)

    def _add_hit(self, hit: SinkHit) -> None:
        key = (hit.flow_key, hit.entry, hit.command)
        if key in self._hit_keys:
            return
        self._hit_keys.add(key)
        self.obs.hits.append(hit)


def unwrap_args(args: list, max_depth: int = 4) -> tuple[list, list]:
    """Unwrap each argument at a host boundary.

    Found taints carry the argument index in their path. A taint whose type is
    still Unknown when it leaves the program is settled as Text; its underlying
    value is left alone.
    """
    plain = []
    found = []
    for i, arg in enumerate(args):
        value, taints = unwrap_deep(arg, max_depth)
        plain.append(value)
        for t, path in taints:
            if isinstance(t, TaintValue) and t.inferred_type == UNKNOWN:
                t.refine(TEXT)
            found.append((t, (i,) + path))
    return plain, found
