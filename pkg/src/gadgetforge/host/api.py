"""Simulated host library: sink registry, unwrapping call wrapper and effects log.

Nothing here touches the real system. Process, file and network functions
append an effect record describing what would have happened.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from ..frontend import parse_expression
from ..frontend.lexer import FrontendError
from ..interpreter.interp import UncaughtError, strict_equals
from ..interpreter.values import (
    UNDEFINED,
    HostFunctionRef,
    JSArray,
    JSObject,
    NativeFunction,
    Tainted,
    JSFunction,
    is_callable,
    lookup_property,
    number_to_text,
)
from ..taint.analysis import unwrap_args
from ..taint.model import find_taints

CATEGORIES = ("ACE", "ACI", "LFI", "FileWrite", "FileRead", "Network", "None")
UNWRAP_DEPTH = 4
CANNED_PID = 4242.0


class HostError(Exception):
    """Invalid arguments for a host function; logged, never fatal to the run."""


@dataclass(frozen=True)
class SpecialCondition:
    arg_index: int
    groups: tuple  # tuple of tuples of property names
    description: str = ""


@dataclass(frozen=True)
class HostFunction:
    module: str
    name: str
    category: str
    impl: Callable = field(compare=False, repr=False)

    @property
    def qualified(self) -> str:
        return f"{self.module}.{self.name}"


REGISTRY: dict[tuple[str, str], HostFunction] = {}


def host(module: str, name: str, category: str = "None"):
    def register(fn):
        assert category in CATEGORIES, category
        REGISTRY[(module, name)] = HostFunction(module, name, category, fn)
        return fn

    return register


DEFAULT_SPECIAL_TABLE = "special_sinks.json"


@lru_cache(maxsize=16)
def load_special_table(path: str | None = None) -> dict:
    """Load the special-sink table, keyed by (module, name)."""
    if path is None:
        text = resources.files("gadgetforge.data").joinpath(DEFAULT_SPECIAL_TABLE).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table = {}
    for row in json.loads(text):
        groups = tuple(tuple(g) for g in row["groups"])
        if not groups:
            raise ValueError(f"special sink {row['module']}.{row['name']} has no groups")
        table[(row["module"], row["name"])] = SpecialCondition(row["argIndex"], groups, row.get("description", ""))
    return table


def is_pollutable(value: Any, prop: str, root: JSObject) -> bool:
    """True iff ``prop`` would be read from the root prototype of ``value``'s chain."""
    if not isinstance(value, JSObject):
        return False
    obj: JSObject | None = value
    while obj is not None:
        if obj is root:
            return True
        if obj.get_own(prop)[0]:
            return False
        obj = obj.proto
    return False


def check_special(cond: SpecialCondition | None, plain_args: list, root: JSObject):
    """First satisfied group as ``(argIndex, group)``, or None."""
    if cond is None or cond.arg_index >= len(plain_args):
        return None
    arg = plain_args[cond.arg_index]
    for group in cond.groups:
        if all(is_pollutable(arg, prop, root) for prop in group):
            return (cond.arg_index, group)
    return None


@dataclass
class HostCall:
    """What a host function body gets to see."""

    env: "HostEnv"
    interp: Any
    spec: HostFunction
    node: Any

    def effect(self, **fields) -> dict:
        record = {"api": self.spec.qualified, "category": self.spec.category}
        record.update(fields)
        self.interp.effects.append(record)
        return record


class HostEnv:
    """Host environment for exactly one interpreter."""

    def __init__(self, special_table: str | None = None):
        self.special = load_special_table(special_table)
        self.calls: list[tuple[str, str, str]] = []
        self.interp = None
        self.refs: dict[tuple[str, str], HostFunctionRef] = {}

    def install(self, interp) -> None:
        self.interp = interp
        modules: dict[str, JSObject] = {}
        for (module, name), spec in REGISTRY.items():
            obj = modules.setdefault(module, interp.new_object())
            ref = HostFunctionRef(interp.root, spec)
            self.refs[(module, name)] = ref
            obj.set_own(name, ref)
        process = modules.setdefault("process", interp.new_object())
        process.set_own("argv0", "node")
        process.set_own("env", interp.new_object({"PATH": "/usr/bin:/bin", "HOME": "/home/app"}))
        modules["obj"] = self._obj_module(interp)
        std = interp.new_object(modules)
        interp.globals.declare("std", std)
        for name in ("child_process", "vm", "module", "fs", "net", "util", "process"):
            interp.builtin_modules[name] = modules[name]

    def lookup(self, module: str, name: str) -> HostFunctionRef:
        return self.refs[(module, name)]

    def process_env(self) -> Any:
        std = self.interp.globals.vars["std"]
        return std.props["process"].props["env"]

    def invoke(self, interp, spec: HostFunction, args: list, node) -> Any:
        plain, taints = unwrap_args(args, UNWRAP_DEPTH)
        special = check_special(self.special.get((spec.module, spec.name)), plain, interp.root)
        interp.hooks.on_host_call(spec, plain, taints, special, node)
        self.calls.append((spec.module, spec.name, spec.category))
        for arg in plain:
            # host purity: semantics only ever see plain values
            assert not find_taints(arg, UNWRAP_DEPTH), f"{spec.qualified} observed a wrapped value"
        call = HostCall(self, interp, spec, node)
        try:
            return spec.impl(call, plain)
        except HostError as exc:
            call.effect(error=str(exc))
            return UNDEFINED

    # -- std.obj: heap intrinsics, implemented as plain natives -------------

    def _obj_module(self, interp) -> JSObject:
        def bare(i, this, args, node):
            return JSObject(None)

        def create(i, this, args, node):
            proto = args[0] if args and isinstance(args[0], JSObject) else None
            return JSObject(proto)

        def keys(i, this, args, node):
            target = args[0] if args else UNDEFINED
            return i.new_array(target.own_keys() if isinstance(target, JSObject) else [])

        def has_own(i, this, args, node):
            if len(args) < 2 or not isinstance(args[0], JSObject):
                return False
            return args[0].get_own(i.to_property_key(args[1]))[0]

        def assign(i, this, args, node):
            target = args[0] if args else UNDEFINED
            if not isinstance(target, JSObject):
                return target
            for src in args[1:]:
                if isinstance(src, JSObject):
                    for k in src.own_keys():
                        target.set_own(k, src.get_own(k)[1])
            return target

        obj = interp.new_object()
        for name, impl in (("bare", bare), ("create", create), ("keys", keys), ("hasOwn", has_own), ("assign", assign)):
            obj.set_own(name, NativeFunction(interp.root, name, impl))
        return obj


# -- value helpers -------------------------------------------------------


def to_json(value: Any, depth: int = UNWRAP_DEPTH) -> Any:
    """JSON-friendly snapshot of a plain MiniJS value for effect records."""
    if value is UNDEFINED or value is None:
        return None
    if isinstance(value, bool) or isinstance(value, str):
        return value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return number_to_text(value)
        return int(value) if value == int(value) and abs(value) < 2**53 else value
    if is_callable(value):
        return f"[function {getattr(value, 'name', '') or 'anonymous'}]"
    if depth <= 0:
        return "[...]"
    if isinstance(value, JSArray):
        return [to_json(x, depth - 1) for x in value.items]
    if isinstance(value, JSObject):
        return {k: to_json(value.get_own(k)[1], depth - 1) for k in value.own_keys()}
    if isinstance(value, Tainted):  # pragma: no cover - excluded by host purity
        raise AssertionError("wrapped value reached host semantics")
    return str(value)


def display(interp, value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, JSArray):
        return json.dumps(to_json(value), separators=(",", ":"))
    if isinstance(value, JSObject) and not is_callable(value):
        return json.dumps(to_json(value), separators=(",", ":"))
    return interp.to_text(value)


def _arg(args: list, i: int) -> Any:
    return args[i] if i < len(args) else UNDEFINED


def _text_arg(args: list, i: int, what: str) -> str:
    value = _arg(args, i)
    if isinstance(value, float):
        return number_to_text(value)
    if not isinstance(value, str):
        raise HostError(f"{what} must be text, got {to_json(value)!r}")
    return value


def _resolve(call: HostCall, options: Any, key: str) -> Any:
    if not isinstance(options, JSObject):
        return UNDEFINED
    return lookup_property(options, key, call.interp.root).value


def _process_fields(call: HostCall, options: Any) -> dict:
    shell = _resolve(call, options, "shell")
    env = _resolve(call, options, "env")
    if not isinstance(env, JSObject):
        env = call.env.process_env()
    node_options = lookup_property(env, "NODE_OPTIONS", call.interp.root).value
    return {"shell": to_json(shell), "nodeOptions": to_json(node_options)}


def _text_list(value: Any) -> list:
    if value is UNDEFINED or value is None:
        return []
    if not isinstance(value, JSArray):
        raise HostError("args must be an array")
    return [to_json(x) for x in value.items]


# -- child_process -------------------------------------------------------


@host("child_process", "exec", "ACI")
def cp_exec(call: HostCall, args: list):
    command = _text_arg(args, 0, "command")
    call.effect(command=command, args=[], **_process_fields(call, _arg(args, 1)))
    return call.interp.new_object({"pid": CANNED_PID})


@host("child_process", "execSync", "ACI")
def cp_exec_sync(call: HostCall, args: list):
    command = _text_arg(args, 0, "command")
    call.effect(command=command, args=[], **_process_fields(call, _arg(args, 1)))
    return ""


def _spawn_like(call: HostCall, args: list) -> None:
    command = _text_arg(args, 0, "command")
    argv = _arg(args, 1)
    options = _arg(args, 2)
    if isinstance(argv, JSObject) and not isinstance(argv, JSArray):
        argv, options = UNDEFINED, argv
    call.effect(command=command, args=_text_list(argv), **_process_fields(call, options))


@host("child_process", "spawn", "ACI")
def cp_spawn(call: HostCall, args: list):
    _spawn_like(call, args)
    return call.interp.new_object({"pid": CANNED_PID, "stdout": ""})


@host("child_process", "spawnSync", "ACI")
def cp_spawn_sync(call: HostCall, args: list):
    _spawn_like(call, args)
    return call.interp.new_object({"status": 0.0, "stdout": ""})


@host("child_process", "fork", "ACI")
def cp_fork(call: HostCall, args: list):
    _spawn_like(call, args)
    return call.interp.new_object({"pid": CANNED_PID})


# -- vm ------------------------------------------------------------------


@host("vm", "evalCode", "ACE")
def vm_eval_code(call: HostCall, args: list):
    code = _text_arg(args, 0, "code")
    call.effect(code=code)
    try:
        return call.interp.eval_source(code, "<eval>")
    except FrontendError as exc:
        raise HostError(f"evalCode: {exc}") from None


@host("vm", "makeFunction", "ACE")
def vm_make_function(call: HostCall, args: list):
    if not args:
        raise HostError("makeFunction needs a body")
    params = [_text_arg(args, i, "parameter") for i in range(len(args) - 1)]
    body = _text_arg(args, len(args) - 1, "body")
    call.effect(params=params, body=body)
    source = f"function anonymous({', '.join(params)}) {{\n{body}\n}}"
    try:
        node = parse_expression(source, "<function>")
    except FrontendError as exc:
        raise HostError(f"makeFunction: {exc}") from None
    interp = call.interp
    return JSFunction(interp.root, "anonymous", node.params, node.body, interp.globals, "<function>", node)


# -- module --------------------------------------------------------------


@host("module", "load", "LFI")
def module_load(call: HostCall, args: list):
    path = _text_arg(args, 0, "path")
    interp = call.interp
    call.effect(path=path)
    if path in interp.builtin_modules:
        return interp.builtin_modules[path]
    try:
        rel = interp.resolve_path(path, interp.current_file, call.node.loc)
    except UncaughtError as exc:
        raise HostError(exc.message) from None
    return interp.load_module(rel, call.node.loc)


# -- fs / net ------------------------------------------------------------


@host("fs", "readFile", "FileRead")
def fs_read_file(call: HostCall, args: list):
    call.effect(path=_text_arg(args, 0, "path"))
    return ""


@host("fs", "existsSync", "FileRead")
def fs_exists(call: HostCall, args: list):
    call.effect(path=_text_arg(args, 0, "path"))
    return False


@host("fs", "writeFile", "FileWrite")
def fs_write_file(call: HostCall, args: list):
    call.effect(path=_text_arg(args, 0, "path"), data=to_json(_arg(args, 1)))
    return UNDEFINED


@host("net", "request", "Network")
def net_request(call: HostCall, args: list):
    call.effect(url=_text_arg(args, 0, "url"), options=to_json(_arg(args, 1)))
    return call.interp.new_object({"status": 200.0, "body": ""})


@host("net", "connect", "Network")
def net_connect(call: HostCall, args: list):
    call.effect(host=_text_arg(args, 0, "host"), port=to_json(_arg(args, 1)))
    return call.interp.new_object({"connected": True})


# -- category None -------------------------------------------------------


@host("console", "log")
def console_log(call: HostCall, args: list):
    line = " ".join(display(call.interp, a) for a in args)
    call.interp.stdout.append(line)
    call.effect(line=line)
    return UNDEFINED


@host("console", "error")
def console_error(call: HostCall, args: list):
    line = " ".join(display(call.interp, a) for a in args)
    call.interp.stdout.append(line)
    call.effect(line=line)
    return UNDEFINED


@host("json", "stringify")
def json_stringify(call: HostCall, args: list):
    value = _arg(args, 0)
    if value is UNDEFINED or is_callable(value):
        return UNDEFINED
    return json.dumps(to_json(value, 16), separators=(",", ":"), ensure_ascii=False)


@host("json", "parse")
def json_parse(call: HostCall, args: list):
    text = _text_arg(args, 0, "text")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HostError(f"invalid JSON: {exc.msg}") from None
    return call.interp.to_plain_object(data)


@host("util", "format")
def util_format(call: HostCall, args: list):
    if not args:
        return ""
    interp = call.interp
    fmt = display(interp, args[0])
    rest = list(args[1:])
    out = []
    i = 0
    while i < len(fmt):
        ch = fmt[i]
        if ch == "%" and i + 1 < len(fmt) and fmt[i + 1] in "sdj%":
            kind = fmt[i + 1]
            i += 2
            if kind == "%":
                out.append("%")
            elif not rest:
                out.append("%" + kind)
            else:
                value = rest.pop(0)
                if kind == "d":
                    out.append(number_to_text(interp.to_number(value)))
                elif kind == "j":
                    out.append(json.dumps(to_json(value), separators=(",", ":")))
                else:
                    out.append(display(interp, value))
            continue
        out.append(ch)
        i += 1
    text = "".join(out)
    if rest:
        text = " ".join([text] + [display(interp, v) for v in rest])
    return text


@host("test", "assert")
def test_assert(call: HostCall, args: list):
    if not call.interp.truthy(_arg(args, 0)):
        message = display(call.interp, _arg(args, 1)) if len(args) > 1 else "assertion failed"
        raise UncaughtError(f"assertion failed: {message}", call.node.loc)
    return UNDEFINED


@host("test", "equal")
def test_equal(call: HostCall, args: list):
    a, b = _arg(args, 0), _arg(args, 1)
    if not strict_equals(a, b):
        raise UncaughtError(
            f"expected {display(call.interp, b)}, got {display(call.interp, a)}", call.node.loc
        )
    return UNDEFINED


@host("process", "cwd")
def process_cwd(call: HostCall, args: list):
    return "/app"
