"""Tree-walking evaluator for MiniJS."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Any, Iterable

from ..frontend import ast as A
from ..frontend import parse_source
from ..frontend.ast import SourceLocation
from ..frontend.lexer import FrontendError
from . import natives
from .hooks import CallInfo, HookSet, Invoke, Iterate, PropertyGet, PropertySet
from .values import (
    UNDEFINED,
    BoundMethod,
    HostFunctionRef,
    JSArray,
    JSFunction,
    JSObject,
    NativeFunction,
    Tainted,
    is_callable,
    lookup_property,
    number_to_text,
    type_name,
)

DEFAULT_STEP_BUDGET = 5_000_000
MAX_CALL_DEPTH = 200
SOURCE_SUFFIX = ".mjs.txt"

COMPLETED = "Completed"
UNCAUGHT = "UncaughtError"
BUDGET = "BudgetExceeded"


class UncaughtError(Exception):
    def __init__(self, message: str, loc: SourceLocation | None):
        where = f"{loc}: " if loc is not None else ""
        super().__init__(f"{where}{message}")
        self.message = message
        self.loc = loc


class BudgetExceeded(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class RunOutcome:
    status: str
    stdout: list[str]
    effects: list[dict]
    steps: int
    error: str | None = None
    error_loc: SourceLocation | None = None

    def observable(self) -> tuple:
        """The parts two runs must agree on to count as equivalent."""
        return (self.status, tuple(self.stdout), _freeze(self.effects), self.error)


def _freeze(value):
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


@dataclass
class Frame:
    name: str
    file: str
    call_loc: SourceLocation | None


class Env:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: "Env | None" = None):
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def declare(self, name: str, value: Any) -> None:
        self.vars[name] = value

    def find(self, name: str) -> "Env | None":
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None


@dataclass
class Module:
    path: str
    exports: Any = UNDEFINED
    loaded: bool = False


class Interpreter:
    """One isolated MiniJS heap with its own root prototype.

    ``host`` installs the ``std`` global and host modules; ``hooks`` observes
    and may replace the results of instrumented nodes.
    """

    def __init__(
        self,
        package_root: str | Path,
        host=None,
        hooks: HookSet | None = None,
        budget: int = DEFAULT_STEP_BUDGET,
    ):
        self.package_root = Path(package_root).resolve()
        self.hooks = hooks if hooks is not None else HookSet()
        self.budget = budget
        self.steps = 0
        self.stdout: list[str] = []
        self.effects: list[dict] = []
        self.frames: list[Frame] = []
        self.current_file = ""
        self.modules: dict[str, Module] = {}

        self.root = JSObject(None)
        self.array_proto = JSObject(self.root)
        self.string_methods: dict[str, NativeFunction] = {}
        natives.install(self)

        self.globals = Env()
        self.builtin_modules: dict[str, Any] = {}
        self.host = host
        if host is not None:
            host.install(self)
        self.hooks.attach(self)
        if sys.getrecursionlimit() < 20_000:
            sys.setrecursionlimit(20_000)

    # -- value construction ---------------------------------------------

    def new_object(self, props: dict | None = None) -> JSObject:
        return JSObject(self.root, dict(props) if props else None)

    def new_array(self, items: Iterable = ()) -> JSArray:
        return JSArray(self.array_proto, list(items))

    def native(self, name: str, impl) -> NativeFunction:
        return NativeFunction(self.root, name, impl)

    def to_plain_object(self, value: Any) -> Any:
        """Convert Python data (dict/list/str/float/bool/None) to MiniJS values."""
        if isinstance(value, dict):
            return self.new_object({k: self.to_plain_object(v) for k, v in value.items()})
        if isinstance(value, (list, tuple)):
            return self.new_array(self.to_plain_object(v) for v in value)
        if isinstance(value, bool) or value is None or value is UNDEFINED or isinstance(value, str):
            return value
        if isinstance(value, (int, float)):
            return float(value)
        return value

    # -- running --------------------------------------------------------

    def run_file(self, rel_path: str) -> RunOutcome:
        """Evaluate a package file as the main module and capture the outcome."""
        try:
            self.load_module(rel_path, None)
            status, error, error_loc = COMPLETED, None, None
        except BudgetExceeded:
            status, error, error_loc = BUDGET, "step budget exhausted", None
            self.steps = self.budget
        except UncaughtError as exc:
            status, error, error_loc = UNCAUGHT, str(exc), exc.loc
        except FrontendError as exc:
            status, error, error_loc = UNCAUGHT, str(exc), exc.loc
        except RecursionError:
            status, error, error_loc = UNCAUGHT, "maximum call depth exceeded", None
        return RunOutcome(status, list(self.stdout), list(self.effects), self.steps, error, error_loc)

    def run_program(self, program: A.Program) -> RunOutcome:
        """Evaluate an already-parsed program in a fresh module scope."""
        try:
            self.exec_module_body(program, Module(program.file))
            status, error, error_loc = COMPLETED, None, None
        except BudgetExceeded:
            status, error, error_loc = BUDGET, "step budget exhausted", None
            self.steps = self.budget
        except UncaughtError as exc:
            status, error, error_loc = UNCAUGHT, str(exc), exc.loc
        except RecursionError:
            status, error, error_loc = UNCAUGHT, "maximum call depth exceeded", None
        return RunOutcome(status, list(self.stdout), list(self.effects), self.steps, error, error_loc)

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded()

    # -- modules --------------------------------------------------------

    def resolve_path(self, spec: str, from_file: str, loc) -> str:
        base = PurePosixPath(from_file).parent if from_file else PurePosixPath(".")
        candidates = [spec] if spec.endswith(SOURCE_SUFFIX) else [spec, spec + SOURCE_SUFFIX]
        for cand in candidates:
            rel = _normalize(base / cand) if not cand.startswith("/") else None
            if rel is None:
                continue
            full = (self.package_root / rel).resolve()
            try:
                full.relative_to(self.package_root)
            except ValueError:
                raise UncaughtError(f"module path escapes package root: {spec}", loc) from None
            if full.is_file():
                return rel
        raise UncaughtError(f"cannot find module '{spec}'", loc)

    def load_module(self, rel_path: str, loc) -> Any:
        rel = self.resolve_path(rel_path, "", loc) if loc is None else rel_path
        mod = self.modules.get(rel)
        if mod is not None:
            return mod.exports
        source = (self.package_root / rel).read_text(encoding="utf-8")
        program = parse_source(source, rel)
        mod = Module(rel)
        self.modules[rel] = mod
        self.exec_module_body(program, mod)
        return mod.exports

    def exec_module_body(self, program: A.Program, mod: Module) -> None:
        saved = self.current_file
        self.current_file = program.file
        mod.exports = self.new_object()
        env = Env(self.globals)
        try:
            self.exec_block(program.body, env, mod)
        finally:
            self.current_file = saved
        mod.loaded = True

    def require(self, spec: Any, node: A.RequireExpr) -> Any:
        if isinstance(spec, Tainted) and self.host is not None:
            load = self.host.lookup("module", "load")
            return self.call_value(load, UNDEFINED, [spec], node, CallInfo("require"))
        spec = self.to_text(spec)
        if spec in self.builtin_modules:
            return self.builtin_modules[spec]
        if not (spec.startswith("./") or spec.startswith("../")):
            raise UncaughtError(f"cannot find module '{spec}'", node.loc)
        rel = self.resolve_path(spec, self.current_file, node.loc)
        return self.load_module(rel, node.loc)

    def eval_source(self, source: str, file: str = "<eval>") -> Any:
        """Parse and run ``source`` in a fresh scope; return the last expression value."""
        program = parse_source(source, file)
        env = Env(self.globals)
        saved = self.current_file
        self.current_file = file
        try:
            return self.exec_block(program.body, env, Module(file), want_last=True)
        finally:
            self.current_file = saved

    # -- statements -----------------------------------------------------

    def exec_block(self, body: list, env: Env, mod: Module | None = None, want_last: bool = False):
        for stmt in body:
            if stmt.kind == "FunctionDecl":
                env.declare(stmt.name, self.make_function(stmt, env))
        last = UNDEFINED
        for stmt in body:
            last = self.exec_stmt(stmt, env, mod)
        return last if want_last else None

    def exec_stmt(self, node: A.Node, env: Env, mod: Module | None) -> Any:
        self.tick()
        k = node.kind
        if k == "VarDecl":
            value = UNDEFINED if node.init is None else self.eval(node.init, env)
            env.declare(node.name, value)
            return UNDEFINED
        if k == "FunctionDecl":
            return UNDEFINED
        if k == "If":
            if self.hooks.on_condition_test(self.eval(node.test, env), node.test):
                self.exec_block(node.then, Env(env), mod)
            elif node.other is not None:
                self.exec_block(node.other, Env(env), mod)
            return UNDEFINED
        if k == "While":
            while self.hooks.on_condition_test(self.eval(node.test, env), node.test):
                self.exec_block(node.body, Env(env), mod)
                self.tick()
            return UNDEFINED
        if k == "For":
            self.exec_for(node, env, mod)
            return UNDEFINED
        if k == "Return":
            raise _Return(UNDEFINED if node.value is None else self.eval(node.value, env))
        if k == "ExportStmt":
            value = self.eval(node.value, env)
            if mod is not None:
                mod.exports = value
            return UNDEFINED
        return self.eval(node, env)

    def exec_for(self, node: A.For, env: Env, mod) -> None:
        loop_env = Env(env)
        if node.each is not None:
            items = self.iterate(self.eval(node.iterable, env), node)
            for item in items:
                body_env = Env(loop_env)
                body_env.declare(node.each, item)
                self.exec_block(node.body, body_env, mod)
                self.tick()
            return
        if node.init is not None:
            self.exec_stmt(node.init, loop_env, mod)
        while True:
            if node.test is not None:
                if not self.hooks.on_condition_test(self.eval(node.test, loop_env), node.test):
                    break
            self.exec_block(node.body, Env(loop_env), mod)
            if node.update is not None:
                self.eval(node.update, loop_env)
            self.tick()

    def iterate(self, value: Any, node) -> list:
        if isinstance(value, Tainted):
            return list(self.hooks.on_taint_operation(value, Iterate(), node))
        if isinstance(value, JSArray):
            return list(value.items)
        if isinstance(value, str):
            return list(value)
        raise UncaughtError(f"{self.describe(value)} is not iterable", node.loc)

    # -- expressions ----------------------------------------------------

    def eval(self, node: A.Node, env: Env) -> Any:
        self.tick()
        method = getattr(self, "eval_" + node.kind)
        return method(node, env)

    def eval_Literal(self, node, env):
        return node.value

    def eval_Identifier(self, node, env):
        scope = env.find(node.name)
        if scope is None:
            if node.name == "this":
                return UNDEFINED
            raise UncaughtError(f"{node.name} is not defined", node.loc)
        return scope.vars[node.name]

    def eval_Assign(self, node, env):
        value = self.eval(node.value, env)
        scope = env.find(node.name)
        if scope is None:
            raise UncaughtError(f"assignment to undeclared variable {node.name}", node.loc)
        scope.vars[node.name] = value
        return value

    def eval_ObjectLiteral(self, node, env):
        obj = self.new_object()
        for key, value_node in node.props:
            obj.set_own(key, self.eval(value_node, env))
        return obj

    def eval_ArrayLiteral(self, node, env):
        return self.new_array([self.eval(e, env) for e in node.elements])

    def eval_FunctionExpr(self, node, env):
        return self.make_function(node, env)

    def make_function(self, node, env: Env) -> JSFunction:
        return JSFunction(self.root, node.name, node.params, node.body, env, self.current_file, node)

    def member_key(self, node, env) -> str:
        if not node.computed:
            return node.key
        return self.to_property_key(self.eval(node.key, env))

    def to_property_key(self, value: Any) -> str:
        if isinstance(value, Tainted):
            value = self.hooks.on_coerce(value, "string")
        if isinstance(value, float):
            return number_to_text(value)
        return self.to_text(value)

    def eval_MemberRead(self, node, env):
        base = self.eval(node.obj, env)
        key = self.member_key(node, env)
        return self.read_member(base, key, node)

    def read_member(self, base: Any, key: str, node) -> Any:
        """Property read as the program sees it, with hooks applied."""
        if isinstance(base, Tainted):
            return self.hooks.on_taint_operation(base, PropertyGet(key), node)
        if isinstance(base, JSObject):
            lookup = lookup_property(base, key, self.root)
            return self.hooks.on_property_read(base, key, lookup, node)
        if base is UNDEFINED or base is None:
            raise UncaughtError(
                f"cannot read property '{key}' of {self.describe(base)}", node.loc
            )
        if isinstance(base, str):
            return natives.string_property(self, base, key)
        return UNDEFINED

    def eval_MemberWrite(self, node, env):
        base = self.eval(node.obj, env)
        key = self.member_key(node, env)
        value = self.eval(node.value, env)
        return self.write_member(base, key, value, node)

    def write_member(self, base: Any, key: str, value: Any, node) -> Any:
        if isinstance(base, Tainted):
            return self.hooks.on_taint_operation(base, PropertySet(key, value), node)
        if base is UNDEFINED or base is None:
            raise UncaughtError(
                f"cannot set property '{key}' of {self.describe(base)}", node.loc
            )
        stored = self.hooks.on_property_write(base, key, value, node)
        if isinstance(base, JSObject):
            base.set_own(key, stored)
        return value

    def eval_Call(self, node, env):
        callee_node = node.callee
        callee = self.eval(callee_node, env)
        args = [self.eval(a, env) for a in node.args]
        name = ""
        if callee_node.kind == "Identifier":
            name = callee_node.name
        elif callee_node.kind == "MemberRead" and not callee_node.computed:
            name = callee_node.key
        return self.call_value(callee, UNDEFINED, args, node, CallInfo(name))

    def eval_MethodCall(self, node, env):
        base = self.eval(node.obj, env)
        key = self.member_key(node, env)
        fn = self.read_member(base, key, node)
        args = [self.eval(a, env) for a in node.args]
        return self.call_value(fn, base, args, node, CallInfo(key, base))

    def eval_RequireExpr(self, node, env):
        return self.require(self.eval(node.arg, env), node)

    def call_value(self, callee: Any, this: Any, args: list, node, info: CallInfo) -> Any:
        hooks = self.hooks
        if isinstance(callee, BoundMethod):
            this, callee = callee.this, callee.fn
        if isinstance(callee, Tainted):
            return hooks.on_taint_operation(callee, Invoke(this, tuple(args)), node)
        if not is_callable(callee):
            what = info.name or "expression"
            raise UncaughtError(f"{what} is not a function", node.loc)
        info.this = this
        args = hooks.on_call_pre(callee, args, node, info)
        if isinstance(callee, JSFunction):
            raw = self.call_function(callee, this, args, node)
        elif isinstance(callee, NativeFunction):
            if isinstance(this, Tainted):
                this = hooks.on_coerce(this, "raw")
            raw = callee.impl(self, this, args, node)
        else:
            raw = self.host.invoke(self, callee.spec, args, node)
        return hooks.on_call_post(callee, args, raw, node, info)

    def call_function(self, fn: JSFunction, this: Any, args: list, node) -> Any:
        if len(self.frames) >= MAX_CALL_DEPTH:
            raise UncaughtError("maximum call depth exceeded", node.loc if node else None)
        env = Env(fn.env)
        env.declare("this", this)
        for i, param in enumerate(fn.params):
            env.declare(param, args[i] if i < len(args) else UNDEFINED)
        self.frames.append(Frame(fn.name, fn.file, node.loc if node is not None else None))
        saved = self.current_file
        self.current_file = fn.file
        try:
            self.exec_block(fn.body, env)
        except _Return as ret:
            return ret.value
        finally:
            self.current_file = saved
            self.frames.pop()
        return UNDEFINED

    def call_from_host(self, fn: Any, this: Any, args: list, node=None) -> Any:
        """Call back into user code from a native or host function."""
        return self.call_value(fn, this, args, node or _NO_NODE, CallInfo(getattr(fn, "name", "")))

    # -- operators ------------------------------------------------------

    def eval_Binary(self, node, env):
        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        raw = self.binary(node.op, left, right)
        return self.hooks.on_binary(node.op, left, right, raw, node)

    def binary(self, op: str, left: Any, right: Any) -> Any:
        if op in ("===", "!=="):
            same = strict_equals(self.coerce(left, "raw"), self.coerce(right, "raw"))
            return same if op == "===" else not same
        if op in ("==", "!="):
            same = self.loose_equals(self.coerce(left, "raw"), self.coerce(right, "raw"))
            return same if op == "==" else not same
        if op == "+":
            lp = self.to_primitive(left, "default")
            rp = self.to_primitive(right, "default")
            if isinstance(lp, str) or isinstance(rp, str):
                return self.to_text(lp) + self.to_text(rp)
            return self.to_number(lp) + self.to_number(rp)
        if op in ("<", "<=", ">", ">="):
            lp = self.to_primitive(left, "number")
            rp = self.to_primitive(right, "number")
            if isinstance(lp, str) and isinstance(rp, str):
                a, b = lp, rp
            else:
                a, b = self.to_number(lp), self.to_number(rp)
                if math.isnan(a) or math.isnan(b):
                    return False
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        a = self.to_number(left)
        b = self.to_number(right)
        if op == "-":
            return a - b
        if op == "*":
            return _mul(a, b)
        if op == "/":
            return _div(a, b)
        if op == "%":
            if b == 0 or math.isinf(a) or math.isnan(a) or math.isnan(b):
                return math.nan
            if math.isinf(b):
                return a
            return math.fmod(a, b)
        raise UncaughtError(f"unknown operator {op}", None)

    def eval_Unary(self, node, env):
        operand = self.eval(node.operand, env)
        op = node.op
        if op == "!":
            raw = not self.truthy(operand)
        elif op == "-":
            raw = -self.to_number(operand)
        else:
            raw = type_name(self.coerce(operand, "raw"))
        return self.hooks.on_unary(op, operand, raw, node)

    def eval_logical(self, node, env):
        hooks = self.hooks
        kind = node.kind
        hooks.on_logical_start(kind, node)
        left = self.eval(node.left, env)
        decision = hooks.on_condition_test(left, node)
        if kind == "LogicalAnd":
            value = self.eval(node.right, env) if decision else left
        else:
            value = left if decision else self.eval(node.right, env)
        return hooks.on_logical_end(kind, node, value)

    eval_LogicalOr = eval_logical
    eval_LogicalAnd = eval_logical
    eval_NullishCoalesce = eval_logical

    def eval_Ternary(self, node, env):
        hooks = self.hooks
        hooks.on_logical_start("Ternary", node)
        if hooks.on_condition_test(self.eval(node.test, env), node.test):
            value = self.eval(node.then, env)
        else:
            value = self.eval(node.other, env)
        return hooks.on_logical_end("Ternary", node, value)

    # -- coercions ------------------------------------------------------

    def coerce(self, value: Any, hint: str) -> Any:
        """Route wrapped values through the hook set; plain values pass unchanged."""
        if isinstance(value, Tainted):
            return self.hooks.on_coerce(value, hint)
        return value

    def truthy(self, value: Any) -> bool:
        value = self.coerce(value, "boolean")
        if value is UNDEFINED or value is None or value is False:
            return False
        if value is True:
            return True
        if isinstance(value, float):
            return not (value == 0 or math.isnan(value))
        if isinstance(value, str):
            return value != ""
        return True

    def to_primitive(self, value: Any, hint: str) -> Any:
        value = self.coerce(value, hint)
        if isinstance(value, JSObject) or isinstance(value, BoundMethod):
            return self.object_to_text(value)
        return value

    def to_text(self, value: Any) -> str:
        value = self.to_primitive(value, "string")
        if isinstance(value, str):
            return value
        if value is UNDEFINED:
            return "undefined"
        if value is None:
            return "null"
        if value is True:
            return "true"
        if value is False:
            return "false"
        return number_to_text(value)

    def to_number(self, value: Any) -> float:
        value = self.to_primitive(value, "number")
        if isinstance(value, bool):
            return 1.0 if value else 0.0
        if isinstance(value, float):
            return value
        if value is None:
            return 0.0
        if value is UNDEFINED:
            return math.nan
        return text_to_number(value)

    def object_to_text(self, value: Any, depth: int = 0) -> str:
        if isinstance(value, JSArray):
            if depth > 8:
                return ""
            return ",".join(self.element_to_text(item, depth) for item in value.items)
        if is_callable(value):
            name = getattr(value, "name", "")
            return f"function {name}() {{ [code] }}"
        return "[object Object]"

    def element_to_text(self, item: Any, depth: int = 0) -> str:
        """Text of an array element as join() renders it (nullish becomes "")."""
        if isinstance(item, Tainted):
            item = self.hooks.on_coerce(item, "string")
        if item is UNDEFINED or item is None:
            return ""
        if isinstance(item, JSArray):
            return self.object_to_text(item, depth + 1)
        return self.to_text(item)

    def loose_equals(self, a: Any, b: Any) -> bool:
        if (a is UNDEFINED or a is None) and (b is UNDEFINED or b is None):
            return True
        if a is UNDEFINED or a is None or b is UNDEFINED or b is None:
            return False
        if type(a) is type(b):
            return strict_equals(a, b)
        if isinstance(a, bool):
            return self.loose_equals(1.0 if a else 0.0, b)
        if isinstance(b, bool):
            return self.loose_equals(a, 1.0 if b else 0.0)
        if isinstance(a, float) and isinstance(b, str):
            return a == text_to_number(b)
        if isinstance(a, str) and isinstance(b, float):
            return text_to_number(a) == b
        # object vs primitive compares unequal (no ToPrimitive step)
        return False

    def describe(self, value: Any) -> str:
        if value is UNDEFINED:
            return "undefined"
        if value is None:
            return "null"
        return type_name(value)

    def call_stack(self) -> list[Frame]:
        return list(self.frames)


_NO_NODE = A.Literal(SourceLocation("<host>", 1, 1, 0, 1), UNDEFINED)


def strict_equals(a: Any, b: Any) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, float) and isinstance(b, float):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return a is b


def text_to_number(text: str) -> float:
    s = text.strip()
    if s == "":
        return 0.0
    if s in ("Infinity", "+Infinity"):
        return math.inf
    if s == "-Infinity":
        return -math.inf
    low = s.lower()
    if low in ("inf", "+inf", "-inf", "infinity", "-infinity", "nan", "+nan", "-nan"):
        return math.nan
    try:
        return float(s)
    except ValueError:
        return math.nan


def _mul(a: float, b: float) -> float:
    try:
        return a * b
    except OverflowError:  # pragma: no cover
        return math.inf


def _div(a: float, b: float) -> float:
    if b == 0:
        if a == 0 or math.isnan(a):
            return math.nan
        sign = math.copysign(1.0, a) * math.copysign(1.0, b)
        return math.inf * sign
    return a / b


def _normalize(path: PurePosixPath) -> str | None:
    parts: list[str] = []
    for part in path.parts:
        if part in ("", "."):
            continue
        if part == "..":
            if not parts:
                return None
            parts.pop()
        else:
            parts.append(part)
    return "/".join(parts) if parts else None
