"""Built-in methods for text and arrays."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

from .values import UNDEFINED, JSArray, NativeFunction, array_index

if TYPE_CHECKING:  # pragma: no cover
    from .interp import Interpreter


def _arg(args: list, i: int) -> Any:
    return args[i] if i < len(args) else UNDEFINED


def _int_arg(interp, args, i, default: int) -> int:
    v = _arg(args, i)
    if v is UNDEFINED:
        return default
    n = interp.to_number(v)
    if math.isnan(n):
        return 0
    if math.isinf(n):
        return 10**9 if n > 0 else -(10**9)
    return int(n)


def _rel_index(i: int, length: int) -> int:
    if i < 0:
        return max(length + i, 0)
    return min(i, length)


def _text_this(interp, this) -> str:
    return this if isinstance(this, str) else interp.to_text(this)


# -- text ----------------------------------------------------------------


def s_substring(interp, this, args, node):
    s = _text_this(interp, this)
    a = min(max(_int_arg(interp, args, 0, 0), 0), len(s))
    b = min(max(_int_arg(interp, args, 1, len(s)), 0), len(s))
    if a > b:
        a, b = b, a
    return s[a:b]


def s_slice(interp, this, args, node):
    s = _text_this(interp, this)
    a = _rel_index(_int_arg(interp, args, 0, 0), len(s))
    b = _rel_index(_int_arg(interp, args, 1, len(s)), len(s))
    return s[a:b] if a < b else ""


def s_index_of(interp, this, args, node):
    s = _text_this(interp, this)
    return float(s.find(interp.to_text(_arg(args, 0))))


def s_includes(interp, this, args, node):
    return interp.to_text(_arg(args, 0)) in _text_this(interp, this)


def s_split(interp, this, args, node):
    s = _text_this(interp, this)
    sep = _arg(args, 0)
    if sep is UNDEFINED:
        return interp.new_array([s])
    sep = interp.to_text(sep)
    if sep == "":
        return interp.new_array(list(s))
    return interp.new_array(s.split(sep))


def s_replace(interp, this, args, node):
    s = _text_this(interp, this)
    return s.replace(interp.to_text(_arg(args, 0)), interp.to_text(_arg(args, 1)), 1)


def s_upper(interp, this, args, node):
    return _text_this(interp, this).upper()


def s_lower(interp, this, args, node):
    return _text_this(interp, this).lower()


def s_trim(interp, this, args, node):
    return _text_this(interp, this).strip(" \t\n\r")


def s_starts_with(interp, this, args, node):
    return _text_this(interp, this).startswith(interp.to_text(_arg(args, 0)))


def s_ends_with(interp, this, args, node):
    return _text_this(interp, this).endswith(interp.to_text(_arg(args, 0)))


def s_char_at(interp, this, args, node):
    s = _text_this(interp, this)
    i = _int_arg(interp, args, 0, 0)
    return s[i] if 0 <= i < len(s) else ""


def s_concat(interp, this, args, node):
    return _text_this(interp, this) + "".join(interp.to_text(a) for a in args)


STRING_METHODS = {
    "substring": s_substring,
    "slice": s_slice,
    "indexOf": s_index_of,
    "includes": s_includes,
    "split": s_split,
    "replace": s_replace,
    "toUpperCase": s_upper,
    "toLowerCase": s_lower,
    "trim": s_trim,
    "startsWith": s_starts_with,
    "endsWith": s_ends_with,
    "charAt": s_char_at,
    "concat": s_concat,
}


def string_property(interp: "Interpreter", s: str, key: str) -> Any:
    if key == "length":
        return float(len(s))
    idx = array_index(key)
    if idx is not None:
        return s[idx] if idx < len(s) else UNDEFINED
    fn = interp.string_methods.get(key)
    return fn if fn is not None else UNDEFINED


# -- arrays --------------------------------------------------------------


def _array_this(this) -> JSArray | None:
    return this if isinstance(this, JSArray) else None


def a_push(interp, this, args, node):
    arr = _array_this(this)
    if arr is None:
        return UNDEFINED
    arr.items.extend(args)
    return float(len(arr.items))


def a_pop(interp, this, args, node):
    arr = _array_this(this)
    if arr is None or not arr.items:
        return UNDEFINED
    return arr.items.pop()


def a_shift(interp, this, args, node):
    arr = _array_this(this)
    if arr is None or not arr.items:
        return UNDEFINED
    return arr.items.pop(0)


def a_join(interp, this, args, node):
    arr = _array_this(this)
    if arr is None:
        return ""
    sep = _arg(args, 0)
    sep = "," if sep is UNDEFINED else interp.to_text(sep)
    return sep.join(interp.element_to_text(x) for x in arr.items)


def a_concat(interp, this, args, node):
    arr = _array_this(this)
    items = list(arr.items) if arr is not None else []
    for a in args:
        if isinstance(a, JSArray):
            items.extend(a.items)
        else:
            items.append(a)
    return interp.new_array(items)


def a_slice(interp, this, args, node):
    arr = _array_this(this)
    if arr is None:
        return interp.new_array()
    n = len(arr.items)
    a = _rel_index(_int_arg(interp, args, 0, 0), n)
    b = _rel_index(_int_arg(interp, args, 1, n), n)
    return interp.new_array(arr.items[a:b] if a < b else [])


def _same_value(interp, a, b) -> bool:
    from .interp import strict_equals

    return strict_equals(interp.coerce(a, "raw"), interp.coerce(b, "raw"))


def a_index_of(interp, this, args, node):
    arr = _array_this(this)
    if arr is None:
        return -1.0
    target = _arg(args, 0)
    for i, item in enumerate(arr.items):
        if _same_value(interp, item, target):
            return float(i)
    return -1.0


def a_includes(interp, this, args, node):
    return a_index_of(interp, this, args, node) >= 0


def a_map(interp, this, args, node):
    arr = _array_this(this)
    fn = _arg(args, 0)
    if arr is None:
        return interp.new_array()
    return interp.new_array(
        [interp.call_from_host(fn, UNDEFINED, [x, float(i)], node) for i, x in enumerate(list(arr.items))]
    )


def a_for_each(interp, this, args, node):
    arr = _array_this(this)
    fn = _arg(args, 0)
    if arr is not None:
        for i, x in enumerate(list(arr.items)):
            interp.call_from_host(fn, UNDEFINED, [x, float(i)], node)
    return UNDEFINED


def a_filter(interp, this, args, node):
    arr = _array_this(this)
    fn = _arg(args, 0)
    if arr is None:
        return interp.new_array()
    kept = [
        x for i, x in enumerate(list(arr.items))
        if interp.truthy(interp.call_from_host(fn, UNDEFINED, [x, float(i)], node))
    ]
    return interp.new_array(kept)


ARRAY_METHODS = {
    "push": a_push,
    "pop": a_pop,
    "shift": a_shift,
    "join": a_join,
    "concat": a_concat,
    "slice": a_slice,
    "indexOf": a_index_of,
    "includes": a_includes,
    "map": a_map,
    "forEach": a_for_each,
    "filter": a_filter,
}


def install(interp: "Interpreter") -> None:
    for name, impl in STRING_METHODS.items():
        interp.string_methods[name] = NativeFunction(interp.root, name, impl)
    for name, impl in ARRAY_METHODS.items():
        interp.array_proto.set_own(name, NativeFunction(interp.root, name, impl))
