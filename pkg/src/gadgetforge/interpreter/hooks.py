"""Instrumentation hooks.

The interpreter evaluates each instrumented node's children first, computes
the natural ("raw") result, then hands inputs and raw result to the matching
hook, which returns the value the program actually sees. Hooks never
re-evaluate children.

The base :class:`HookSet` is the no-op set: it returns every raw result
unchanged and answers operations on wrapped values from their underlying
value, so a run with it is a plain evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from .values import UNDEFINED, Lookup, Tainted

if TYPE_CHECKING:  # pragma: no cover
    from .interp import Interpreter


@dataclass(frozen=True)
class PropertyGet:
    key: str


@dataclass(frozen=True)
class PropertySet:
    key: str
    value: Any


@dataclass(frozen=True)
class Invoke:
    this: Any
    args: tuple


@dataclass(frozen=True)
class Iterate:
    pass


@dataclass
class CallInfo:
    """What the interpreter knows about a call site."""

    name: str  # callee name as written at the call site ("" when anonymous)
    this: Any = UNDEFINED
    extra: dict = field(default_factory=dict)


def is_nullish(value: Any) -> bool:
    return value is UNDEFINED or value is None


class HookSet:
    interp: "Interpreter | None" = None

    def attach(self, interp: "Interpreter") -> None:
        self.interp = interp

    # -- heap -----------------------------------------------------------

    def on_property_read(self, base, key: str, lookup: Lookup, node) -> Any:
        return lookup.value

    def on_property_write(self, base, key: str, value, node) -> Any:
        return value

    # -- operators ------------------------------------------------------

    def on_binary(self, op: str, left, right, raw, node) -> Any:
        return raw

    def on_unary(self, op: str, operand, raw, node) -> Any:
        return raw

    def on_logical_start(self, kind: str, node) -> None:
        pass

    def on_logical_end(self, kind: str, node, value) -> Any:
        return value

    def on_condition_test(self, value, node) -> bool:
        interp = self.interp
        if node.kind == "NullishCoalesce":
            # decision is "keep the left operand"
            return not is_nullish(self.on_coerce(value, "raw"))
        return interp.truthy(value)

    # -- calls ----------------------------------------------------------

    def on_call_pre(self, callee, args: list, node, info: CallInfo) -> list:
        return args

    def on_call_post(self, callee, args: list, raw, node, info: CallInfo) -> Any:
        return raw

    def on_host_call(self, spec, plain_args: list, taints: list, special, node) -> None:
        """Observe a host call after argument unwrapping and before its semantics run."""

    # -- wrapped values -------------------------------------------------

    def on_coerce(self, value, hint: str) -> Any:
        """Primitive (or raw) stand-in for ``value``.

        ``hint`` is one of "raw", "default", "string", "number", "boolean".
        Only wrapped values reach here; the caller finishes the conversion.
        """
        if isinstance(value, Tainted):
            return value.underlying
        return value

    def on_taint_operation(self, taint, op, node) -> Any:
        interp = self.interp
        base = taint.underlying
        if isinstance(op, PropertyGet):
            return interp.read_member(base, op.key, node)
        if isinstance(op, PropertySet):
            interp.write_member(base, op.key, op.value, node)
            return op.value
        if isinstance(op, Invoke):
            return interp.call_value(base, op.this, list(op.args), node, CallInfo(""))
        if isinstance(op, Iterate):
            return interp.iterate(base, node)
        raise TypeError(f"unknown taint operation {op!r}")


class PassThroughHooks(HookSet):
    """Explicitly returns each raw result; behaves exactly like :class:`HookSet`.

    Used to check that merely routing through hooks changes nothing.
    """

    def on_property_read(self, base, key, lookup, node):
        raw = lookup.value
        return raw

    def on_binary(self, op, left, right, raw, node):
        return raw

    def on_unary(self, op, operand, raw, node):
        return raw

    def on_logical_end(self, kind, node, value):
        return value

    def on_call_post(self, callee, args, raw, node, info):
        return raw


class HostCallCounter(HookSet):
    """Counts host calls by category; used for the pre-analysis dry run."""

    def __init__(self) -> None:
        self.calls: list[tuple[str, str, str]] = []

    def on_host_call(self, spec, plain_args, taints, special, node) -> None:
        self.calls.append((spec.module, spec.name, spec.category))
