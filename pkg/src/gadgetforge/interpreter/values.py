"""Runtime values for MiniJS.

Primitives map onto Python values: ``UNDEFINED``, ``None`` (null), ``bool``,
``float`` and ``str``. Everything else is a :class:`JSObject` subclass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from ..frontend.ast import UNDEFINED, _Undefined

__all__ = [
    "UNDEFINED",
    "BoundMethod",
    "HostFunctionRef",
    "JSArray",
    "JSFunction",
    "JSObject",
    "Lookup",
    "NativeFunction",
    "Tainted",
    "is_callable",
    "lookup_property",
    "number_to_text",
    "type_name",
]


class JSObject:
    __slots__ = ("props", "proto", "__weakref__")

    def __init__(self, proto: "JSObject | None" = None, props: dict | None = None):
        self.props: dict[str, Any] = {} if props is None else props
        self.proto = proto

    def get_own(self, key: str) -> tuple[bool, Any]:
        if key in self.props:
            return True, self.props[key]
        return False, UNDEFINED

    def set_own(self, key: str, value: Any) -> None:
        self.props[key] = value

    def own_keys(self) -> list[str]:
        return list(self.props)

    def __repr__(self) -> str:
        return f"<object {list(self.props)}>"


class JSArray(JSObject):
    __slots__ = ("items",)

    def __init__(self, proto: JSObject | None, items: list | None = None):
        super().__init__(proto)
        self.items: list = [] if items is None else items

    def get_own(self, key: str) -> tuple[bool, Any]:
        if key == "length":
            return True, float(len(self.items))
        idx = array_index(key)
        if idx is not None:
            if idx < len(self.items):
                return True, self.items[idx]
            return False, UNDEFINED
        return super().get_own(key)

    def set_own(self, key: str, value: Any) -> None:
        idx = array_index(key)
        if idx is not None:
            while len(self.items) <= idx:
                self.items.append(UNDEFINED)
            self.items[idx] = value
        elif key == "length":
            n = int(value) if isinstance(value, float) and value >= 0 else len(self.items)
            del self.items[n:]
        else:
            super().set_own(key, value)

    def own_keys(self) -> list[str]:
        return [str(i) for i in range(len(self.items))] + list(self.props)

    def __repr__(self) -> str:
        return f"<array {self.items!r}>"


class JSFunction(JSObject):
    """A closure over a MiniJS function body."""

    __slots__ = ("name", "params", "body", "env", "file", "node")

    def __init__(self, proto, name, params, body, env, file, node):
        super().__init__(proto)
        self.name = name or ""
        self.params = params
        self.body = body
        self.env = env
        self.file = file
        self.node = node

    def __repr__(self) -> str:
        return f"<function {self.name}>"


class NativeFunction(JSObject):
    """Built-in method implemented in Python: ``impl(interp, this, args)``."""

    __slots__ = ("name", "impl")

    def __init__(self, proto, name: str, impl: Callable):
        super().__init__(proto)
        self.name = name
        self.impl = impl

    def __repr__(self) -> str:
        return f"<native {self.name}>"


class HostFunctionRef(JSObject):
    """Handle to a simulated host API function."""

    __slots__ = ("spec",)

    def __init__(self, proto, spec):
        super().__init__(proto)
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    def __repr__(self) -> str:
        return f"<host {self.spec.module}.{self.spec.name}>"


@dataclass(eq=False)
class BoundMethod:
    """A callable paired with the receiver it was read from."""

    fn: Any
    this: Any

    @property
    def name(self) -> str:
        return getattr(self.fn, "name", "")


class Tainted:
    """Base class for wrapped values; the taint analysis supplies the subclass.

    The interpreter never looks inside a Tainted value itself: every operation
    on one is delegated to the active hook set. Subclasses provide an
    ``underlying`` attribute holding the plain value.
    """

    __slots__ = ()


def array_index(key: str) -> int | None:
    if key.isdigit() and (key == "0" or not key.startswith("0")):
        return int(key)
    return None


def is_callable(value: Any) -> bool:
    return isinstance(value, (JSFunction, NativeFunction, HostFunctionRef, BoundMethod))


def type_name(value: Any) -> str:
    if isinstance(value, _Undefined):
        return "undefined"
    if value is None:
        return "object"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if is_callable(value):
        return "function"
    return "object"


def number_to_text(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if value == int(value) and abs(value) < 1e21:
        return str(int(value))
    text = repr(value)
    if "e" in text:
        mantissa, exp = text.split("e")
        sign = "-" if exp.startswith("-") else "+"
        text = f"{mantissa}e{sign}{exp.lstrip('+-').lstrip('0') or '0'}"
    return text


@dataclass(frozen=True)
class Lookup:
    """Result of a prototype-chain walk.

    ``depth`` is 0 when the key is an own property, ``k`` when found on the
    k-th prototype, and ``None`` when the key is absent from the whole chain.
    """

    value: Any
    depth: int | None
    hits_root: bool
    holder: JSObject | None = None

    @property
    def found(self) -> bool:
        return self.depth is not None


def lookup_property(base: JSObject, key: str, root: JSObject | None) -> Lookup:
    """Walk own properties then the prototype chain of ``base``.

    ``hits_root`` is true iff ``root`` appears anywhere on the chain (including
    ``base`` itself).
    """
    value: Any = UNDEFINED
    depth: int | None = None
    holder = None
    hits_root = False
    obj: JSObject | None = base
    d = 0
    seen = 0
    while obj is not None:
        if obj is root:
            hits_root = True
        if depth is None:
            found, v = obj.get_own(key)
            if found:
                value, depth, holder = v, d, obj
        obj = obj.proto
        d += 1
        seen += 1
        if seen > 10_000:
            raise RuntimeError("prototype chain too long or cyclic")
    return Lookup(value, depth, hits_root, holder)
