import pytest
from hypothesis import given, settings, strategies as st

from gadgetforge.frontend import parse_source
from gadgetforge.host import HostEnv
from gadgetforge.interpreter import (
    BUDGET,
    COMPLETED,
    UNCAUGHT,
    UNDEFINED,
    HookSet,
    Interpreter,
    JSObject,
    PassThroughHooks,
    evaluate_program,
    lookup_property,
)

from helpers import CORPUS, plain, run, write_package
from oracles import chain_walk


def out(src):
    outcome = plain(src)
    assert outcome.status == COMPLETED, outcome.error
    return outcome.stdout


def log(expr):
    return out(f"std.console.log({expr});")


@pytest.mark.parametrize(
    "expr, text",
    [
        ("1 + 2", "3"),
        ('"a" + 1', "a1"),
        ('1 + "2"', "12"),
        ("7 % 3", "1"),
        ("1 / 0", "Infinity"),
        ("0.5 * 4", "2"),
        ('"3" * "4"', "12"),
        ("undefined + 1", "NaN"),
        ('[1, 2] + ""', "1,2"),
        ('({}) + ""', "[object Object]"),
        ("null ?? 5", "5"),
        ("0 ?? 5", "0"),
        ("0 || 5", "5"),
        ('"" && 1', ""),
        ("typeof undefined", "undefined"),
        ("typeof null", "object"),
        ("typeof []", "object"),
        ('typeof "s"', "string"),
        ("typeof std.console.log", "function"),
        ("!0", "true"),
        ('"b" > "a"', "true"),
        ("null == undefined", "true"),
        ('"1" == 1', "true"),
        ('"1" === 1', "false"),
        ("true ? 1 : 2", "1"),
        ('"abc".substring(1)', "bc"),
        ('"a,b".split(",").length', "2"),
        ('"x".concat("y", 1)', "xy1"),
        ('[1, 2, 3].slice(1).join("-")', "2-3"),
        ('[1, null, undefined, 2].join()', "1,,,2"),
        ("[1, 2, 3].map(function (x) { return x * 2; }).join()", "2,4,6"),
        ('"abc".length', "3"),
        ('"abc"[1]', "b"),
    ],
)
def test_expression_semantics(expr, text):
    assert log(expr) == [text]


def test_closures_and_functions():
    assert out(
        """
        function counter() {
          let n = 0;
          return function () { n = n + 1; return n; };
        }
        let c = counter();
        c(); c();
        std.console.log(c());
        """
    ) == ["3"]


def test_hoisting():
    assert out("std.console.log(f()); function f() { return 7; }") == ["7"]


def test_method_this_binding():
    assert out('let o = {n: "x", f: function () { return this.n; }}; std.console.log(o.f());') == ["x"]


def test_loops():
    assert out(
        """
        let total = 0;
        for (let i = 0; i < 4; i = i + 1) { total = total + i; }
        let j = 0;
        while (j < 3) { j = j + 1; }
        for (let x of [10, 20]) { total = total + x; }
        std.console.log(total + j);
        """
    ) == ["39"]


def test_prototype_chain_reads():
    assert out(
        """
        let base = {greet: "hi"};
        let child = std.obj.create(base);
        std.console.log(child.greet);
        let bare = std.obj.bare();
        std.console.log(typeof bare.greet);
        """
    ) == ["hi", "undefined"]


def test_uncaught_error_has_location():
    outcome = plain("let o = undefined;\nlet v = o.x;")
    assert outcome.status == UNCAUGHT
    assert outcome.error_loc.line == 2
    assert "main.mjs.txt:2:" in outcome.error


def test_calling_non_function_is_uncaught():
    assert plain("let x = 1; x();").status == UNCAUGHT


def test_budget_exhaustion():
    interp = Interpreter(CORPUS, HostEnv(), None, 500)
    outcome = interp.run_program(parse_source("while (true) { }", "loop.mjs.txt"))
    assert outcome.status == BUDGET
    assert outcome.steps == 500


def test_deep_recursion_is_uncaught_not_a_crash():
    outcome = plain("function f(n) { return f(n + 1); } f(0);")
    assert outcome.status in (UNCAUGHT, BUDGET)


def test_require_and_module_cache(tmp_path):
    write_package(
        tmp_path,
        {
            "lib.mjs.txt": 'std.console.log("loaded"); module.exports = {v: 1};',
            "main.mjs.txt": 'let a = require("./lib.mjs.txt"); let b = require("./lib"); std.console.log(a === b);',
        },
    )
    outcome, _ = run((tmp_path / "main.mjs.txt").read_text(), root=tmp_path)
    assert outcome.stdout == ["loaded", "true"]


def test_require_outside_root_rejected(tmp_path):
    write_package(tmp_path, {"main.mjs.txt": 'require("../../etc/passwd");'})
    outcome, _ = run((tmp_path / "main.mjs.txt").read_text(), root=tmp_path)
    assert outcome.status == UNCAUGHT


def test_require_builtin_module():
    assert out('let cp = require("child_process"); std.console.log(typeof cp.exec);') == ["function"]


def test_evaluate_program_entry_point():
    outcome = evaluate_program(parse_source('std.console.log("ok");', "m"), HostEnv())
    assert outcome.stdout == ["ok"]


# -- chain walk against the reference oracle ----------------------------------

KEYS = ["a", "b", "c", "toString"]


@st.composite
def chains(draw):
    root = JSObject(None)
    length = draw(st.integers(0, 5))
    attach_root = draw(st.booleans())
    node = root if attach_root else JSObject(None)
    if not attach_root and draw(st.booleans()):
        root.props.update({k: "r" + k for k in draw(st.lists(st.sampled_from(KEYS), unique=True))})
    if attach_root:
        root.props.update({k: "r" + k for k in draw(st.lists(st.sampled_from(KEYS), unique=True))})
    for level in range(length):
        node = JSObject(node)
        for k in draw(st.lists(st.sampled_from(KEYS), unique=True)):
            node.props[k] = f"{k}{level}"
    return node, root


@settings(max_examples=300, deadline=None)
@given(chains(), st.sampled_from(KEYS + ["zz"]))
def test_lookup_matches_reference_walk(chain, key):
    base, root = chain
    result = lookup_property(base, key, root)
    value, depth, hits_root = chain_walk(base, key, root)
    assert result.depth == depth
    assert result.hits_root == hits_root
    assert result.value == (UNDEFINED if depth is None else value)
    assert result.found == (depth is not None)


# -- hook transparency ---------------------------------------------------------

PROGRAMS = [
    'let o = {a: 1}; std.console.log(o.a + 2, o.b);',
    'let xs = [3, 1, 2]; xs.push(4); std.console.log(xs.join("|"), xs.length);',
    'function f(a, b) { return a ?? b; } std.console.log(f(null, "d"), f(0, 1));',
    'let s = "abc"; std.console.log(s.toUpperCase(), typeof s, s === "abc" ? "y" : "n");',
    'let cp = require("child_process"); cp.exec("ls " + "-l");',
]


@pytest.mark.parametrize("src", PROGRAMS)
def test_default_and_pass_through_hooks_agree(src):
    a, _ = run(src, HookSet())
    b, _ = run(src, PassThroughHooks())
    assert a.observable() == b.observable()
    assert a.steps == b.steps
