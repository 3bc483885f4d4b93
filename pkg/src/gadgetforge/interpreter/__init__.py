from .hooks import CallInfo, HookSet, HostCallCounter, Invoke, Iterate, PassThroughHooks, PropertyGet, PropertySet
from .interp import (
    BUDGET,
    COMPLETED,
    DEFAULT_STEP_BUDGET,
    UNCAUGHT,
    BudgetExceeded,
    Interpreter,
    RunOutcome,
    UncaughtError,
    strict_equals,
)
from .values import (
    UNDEFINED,
    BoundMethod,
    HostFunctionRef,
    JSArray,
    JSFunction,
    JSObject,
    Lookup,
    NativeFunction,
    Tainted,
    is_callable,
    lookup_property,
    number_to_text,
    type_name,
)

__all__ = [
    "BUDGET",
    "COMPLETED",
    "DEFAULT_STEP_BUDGET",
    "UNCAUGHT",
    "UNDEFINED",
    "BoundMethod",
    "BudgetExceeded",
    "CallInfo",
    "HookSet",
    "HostCallCounter",
    "HostFunctionRef",
    "Interpreter",
    "Invoke",
    "Iterate",
    "JSArray",
    "JSFunction",
    "JSObject",
    "Lookup",
    "NativeFunction",
    "PassThroughHooks",
    "PropertyGet",
    "PropertySet",
    "RunOutcome",
    "Tainted",
    "UncaughtError",
    "evaluate_program",
    "is_callable",
    "lookup_property",
    "number_to_text",
    "strict_equals",
    "type_name",
]


def evaluate_program(program, host_env=None, hooks=None, budget=DEFAULT_STEP_BUDGET, package_root="."):
    """Run a parsed program once in a fresh interpreter and return its outcome."""
    interp = Interpreter(package_root, host_env, hooks, budget)
    return interp.run_program(program)
