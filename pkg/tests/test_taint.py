import pytest
from hypothesis import given, settings, strategies as st

from gadgetforge.frontend import SourceLocation
from gadgetforge.interpreter import COMPLETED, UNDEFINED, JSArray, JSObject
from gadgetforge.taint import (
    ARRAY,
    BOOLEAN,
    DELAYED,
    FUNCTION,
    IMMEDIATE,
    NUMBER,
    OBJECT,
    TEXT,
    UNKNOWN,
    FlowStep,
    SourceRecord,
    TaintValue,
    default_value,
    unwrap_args,
    unwrap_deep,
)
from gadgetforge.taint.records import TYPE_DEFAULT

from helpers import CORPUS, plain, tainted
from oracles import structural_unwrap, to_python

LOC = SourceLocation("m.mjs.txt", 1, 1, 0, 1)


def make(underlying=UNDEFINED, tag=UNKNOWN, prop="p"):
    return TaintValue(underlying, tag, (SourceRecord(prop, LOC),), (FlowStep("Read", prop, LOC),))


def kept(interp, name="kept"):
    return interp.globals.vars["std"].props[name]


def keep(expr, name="kept"):
    return f"std.{name} = {expr};"


# -- sources ------------------------------------------------------------------


def test_delayed_injection_takes_fallback_value():
    src = 'let opts = {};\nlet bin = opts.bin || "./default.exe";\n' + keep("bin")
    outcome, obs, interp = tainted(src)
    taint = kept(interp)
    assert isinstance(taint, TaintValue)
    assert taint.underlying == "./default.exe"
    assert taint.inferred_type == TEXT
    assert taint.source.injection_mode == DELAYED
    assert taint.source.property == "bin"
    assert taint.source.loc.line == 2 and taint.source.loc.column == 11
    assert taint.flow[0].kind == "Read" and taint.flow[0].loc == taint.source.loc


def test_nullish_coalesce_is_also_delayed():
    _, _, interp = tainted('let o = {}; let v = o.port ?? 8080;' + keep("v"))
    assert kept(interp).underlying == 8080.0
    assert kept(interp).source.injection_mode == DELAYED


def test_defined_property_is_not_injected():
    _, obs, interp = tainted('let opts = {bin: "x"}; let bin = opts.bin || "d";' + keep("bin"))
    assert kept(interp) == "x"
    assert obs.taints == []


def test_immediate_injection_wraps_undefined():
    _, _, interp = tainted("let o = {}; let v = o.missing;" + keep("v"))
    taint = kept(interp)
    assert taint.underlying is UNDEFINED and taint.source.injection_mode == IMMEDIATE


@pytest.mark.parametrize("key", ["toString", "valueOf", "constructor", "then", "length"])
def test_ignored_keys_are_not_sources(key):
    _, obs, _ = tainted(f"let o = {{}}; let v = o.{key};")
    assert obs.taints == []


def test_bare_object_reads_are_not_sources():
    _, obs, _ = tainted("let o = std.obj.bare(); let v = o.missing;")
    assert obs.taints == []


def test_intermediate_prototype_definition_blocks_source():
    _, obs, _ = tainted("let base = {cmd: 1}; let o = std.obj.create(base); let v = o.cmd;")
    assert obs.taints == []
    assert obs.intermediate_hits and obs.intermediate_hits[0][0] == "cmd"


def test_injection_soundness_against_lookup_log():
    from gadgetforge.taint import TaintAnalysis

    from helpers import run

    src = (CORPUS / "nodemailer-shaped" / "index.mjs.txt").read_text()
    src += '\nlet t = createTransport({service: "x"}); t.sendMail({to: "a"}, function (e, i) { return i; });'
    src += "\nlet o = {}; let a = o.alpha; let b = o.toString; let c = std.obj.bare().gamma;"
    hooks = TaintAnalysis(log_lookups=True)
    run(src, hooks)
    for entry in hooks.obs.lookups:
        expected = entry.depth is None and entry.hits_root and entry.key not in ("toString", "valueOf", "constructor", "prototype", "then", "length", "Symbol.iterator")
        assert entry.injected == expected
    injected = {(e.key, e.loc) for e in hooks.obs.lookups if e.injected}
    created = {(s.property, s.loc) for t in hooks.obs.taints for s in t.sources[:1]}
    assert injected == created


# -- operators ----------------------------------------------------------------


def test_binary_plus_extends_flow():
    src = 'let opts = {};\nlet bin = opts.bin || "./default.exe";\nlet cmd = bin + " --flag";\n' + keep("cmd")
    _, _, interp = tainted(src)
    cmd = kept(interp)
    assert cmd.underlying == "./default.exe --flag"
    assert [s.kind for s in cmd.flow] == ["Read", "BinaryOp"]
    assert cmd.flow[1].detail == "+" and cmd.flow[1].loc.line == 3


def test_untainted_binary_untouched():
    _, obs, interp = tainted(keep("2 + 3"))
    assert kept(interp) == 5.0 and obs.taints == []


def test_comparison_records_candidate():
    _, obs, interp = tainted('let o = {}; let r = o.mode === "html";' + keep("r"))
    result = kept(interp)
    assert isinstance(result, TaintValue) and result.underlying is False
    assert obs.candidates["mode"] == ("html", TEXT)


def test_unary_not_and_typeof():
    _, _, interp = tainted('let o = {}; let a = !o.x; let t = typeof o.y;' + keep("a", "a") + keep("t", "t"))
    a, t = kept(interp, "a"), kept(interp, "t")
    assert isinstance(a, TaintValue) and a.underlying is True
    assert isinstance(t, TaintValue) and t.underlying == "undefined"
    assert t.flow[-1].kind == "UnaryOp" and t.flow[-1].detail == "typeof"


def test_typeof_of_text_taint():
    _, _, interp = tainted('let o = {}; let s = o.s || ""; let t = typeof s;' + keep("t"))
    assert kept(interp).underlying == "string"


def test_conditional_records_branch_and_keeps_natural_outcome():
    _, obs, interp = tainted('let o = {}; let r = "no";\nif (o.newProcess) { r = "yes"; }\n' + keep("r"))
    assert kept(interp) == "no"
    (record,) = obs.records
    assert record.properties == frozenset({"newProcess"}) and record.natural is False
    assert record.loc.line == 2


def test_forced_conditional_negates():
    src = 'let o = {}; let r = "no";\nif (o.newProcess) { r = "yes"; }\n' + keep("r")
    _, obs, interp = tainted(src, forced={"newProcess"})
    assert kept(interp) == "yes"
    assert obs.records[0].natural is False


def test_forced_run_ignores_unscheduled_props():
    _, _, interp = tainted('let o = {}; let r = 0; if (o.a) { r = 1; } if (o.b) { r = r + 2; }' + keep("r"), forced={"b"})
    assert kept(interp) == 2.0


def test_plain_conditional_no_record():
    _, obs, _ = tainted("if (true) { let x = 1; }")
    assert obs.records == []


def test_fallback_selected_by_tainted_left_is_wrapped():
    _, _, interp = tainted('let o = {}; let v = o.a;\nlet w = v || "fb";\n' + keep("w"))
    w = kept(interp)
    assert isinstance(w, TaintValue) and w.underlying == "fb"
    assert w.flow[-1].kind == "ConditionTest"


def test_ternary_over_nullish_taint_is_wrapped():
    _, _, interp = tainted('let o = {}; let v = o.a ? o.a : "dflt";' + keep("v"))
    v = kept(interp)
    assert isinstance(v, TaintValue) and v.underlying == "dflt"


# -- wrapper operations ---------------------------------------------------------


def test_property_get_text_method_refines_to_text():
    _, obs, interp = tainted('let o = {}; let v = o.name; let f = v.substring;' + keep("v", "v") + keep("f", "f"))
    v, f = kept(interp, "v"), kept(interp, "f")
    assert v.inferred_type == TEXT
    assert isinstance(f, TaintValue) and f.inferred_type == FUNCTION


def test_property_get_push_refines_to_array():
    _, _, interp = tainted("let o = {}; let v = o.items; v.push(1);" + keep("v"))
    assert kept(interp).inferred_type == ARRAY


def test_property_get_forwards_to_defined_underlying():
    _, _, interp = tainted('let o = {}; let s = o.s || "abc"; let n = s.length;' + keep("n"))
    n = kept(interp)
    assert isinstance(n, TaintValue) and n.underlying == 3.0


def test_invoke_non_callable_returns_child_taint():
    outcome, _, interp = tainted("let o = {}; let r = o.callback(1);" + keep("r"))
    assert outcome.status == COMPLETED
    assert isinstance(kept(interp), TaintValue)


def test_iterate_over_taint_sets_array():
    outcome, _, interp = tainted("let o = {}; let v = o.list; let n = 0; for (let x of v) { n = n + 1; }" + keep("v"))
    assert outcome.status == COMPLETED
    assert kept(interp).inferred_type == ARRAY


def test_coercion_underlying_wins():
    _, _, interp = tainted('let o = {}; let s = o.s || "x"; let t = "" + s;' + keep("t"))
    assert kept(interp).underlying == "x"


# -- builtin propagation ----------------------------------------------------------


def test_join_propagates():
    _, _, interp = tainted('let o = {}; let b = o.b || "b"; let j = ["a", b].join(",");' + keep("j"))
    j = kept(interp)
    assert isinstance(j, TaintValue) and j.underlying == "a,b"
    assert j.flow[-1].kind == "BuiltinPropagation" and j.flow[-1].detail == "join"


def test_plain_join_untouched():
    _, _, interp = tainted('let j = ["a", "b"].join(",");' + keep("j"))
    assert kept(interp) == "a,b"


def test_slice_on_taint_matches_plain_semantics():
    _, _, interp = tainted('let o = {}; let s = o.s || "abc"; let r = s.slice(1);' + keep("r"))
    assert kept(interp).underlying == plain('std.console.log("abc".slice(1));').stdout[0]


def test_util_format_propagates():
    _, _, interp = tainted('let util = require("util"); let o = {}; let h = o.host || "h"; let r = util.format("%s:1", h);' + keep("r"))
    r = kept(interp)
    assert isinstance(r, TaintValue) and r.flow[-1].detail == "util.format"


# -- type inference table ---------------------------------------------------------


def test_rule1_fallback_value_sets_type():
    for fallback, tag in (('"x"', TEXT), ("3", NUMBER), ("true", BOOLEAN), ("[]", ARRAY), ("{}", OBJECT)):
        _, _, interp = tainted(f"let o = {{}}; let v = o.k || {fallback};" + keep("v"))
        assert kept(interp).inferred_type == tag, fallback


def test_rule2_plus_with_text():
    _, _, interp = tainted('let o = {}; let v = o.k; let w = v + "!";' + keep("v"))
    assert kept(interp).inferred_type == TEXT


def test_rule2_plus_with_number_keeps_unknown():
    _, _, interp = tainted("let o = {}; let v = o.k; let w = v + 1;" + keep("v"))
    assert kept(interp).inferred_type == UNKNOWN


def test_rule4_coercion_hint():
    _, _, interp = tainted("let o = {}; let v = o.k; let w = v * 2;" + keep("v"))
    assert kept(interp).inferred_type == NUMBER


def test_rule5_typeof_candidate_and_forced_transition():
    src = 'let o = {}; let r = 0;\nif (typeof o.port === "number") { r = 1; }\nlet p = o.port;' + keep("p")
    _, obs, _ = tainted(src)
    assert obs.candidates["port"] == (TYPE_DEFAULT, NUMBER)
    _, obs2, interp = tainted(src, forced={"port"}, candidates=obs.candidates)
    p = kept(interp)
    assert p.inferred_type == NUMBER and p.underlying == 0.0


def test_rule6_comparison_candidate_forced_transition():
    src = 'let o = {}; let r = "";\nif (o.mode === "html") { r = o.mode; }\n' + keep("r")
    _, obs, _ = tainted(src)
    assert obs.candidates["mode"] == ("html", TEXT)
    _, _, interp = tainted(src, forced={"mode"}, candidates=obs.candidates)
    r = kept(interp)
    assert r.underlying == "html" and r.inferred_type == TEXT


def test_unknown_settles_as_text_at_unwrap():
    taint = make()
    plain_args, found = unwrap_args([taint])
    assert plain_args == [UNDEFINED]
    assert found == [(taint, (0,))]
    assert taint.inferred_type == TEXT


def test_unknown_defaults_like_text():
    assert default_value(UNKNOWN, None) == default_value(TEXT, None) == ""


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([UNKNOWN, TEXT, NUMBER, BOOLEAN, ARRAY, OBJECT, FUNCTION]), max_size=8))
def test_type_inference_never_reverts_to_unknown(tags):
    taint = make()
    seen_concrete = False
    for tag in tags:
        taint.refine(tag)
        taint.refine(tag)  # idempotent
        seen_concrete |= tag != UNKNOWN
        if seen_concrete:
            assert taint.inferred_type != UNKNOWN
        if tag != UNKNOWN:
            assert taint.inferred_type == tag


# -- unwrap ----------------------------------------------------------------------


def test_unwrap_top_level():
    taint = make("./default.exe --flag", TEXT)
    plain_value, found = unwrap_deep(taint)
    assert plain_value == "./default.exe --flag" and found == [(taint, ())]


def test_unwrap_nested_matches_structural_oracle():
    from gadgetforge.interpreter import Interpreter

    interp = Interpreter(CORPUS)
    inner = make(2.0, NUMBER)
    value = interp.new_object({"a": interp.new_array([1.0, inner])})
    plain_value, found = unwrap_deep(value)
    assert to_python(plain_value) == {"a": [1.0, 2.0]}
    assert found == [(inner, ("a", 1))]
    oracle_plain, oracle_found = structural_unwrap(value)
    assert oracle_plain == to_python(plain_value)
    assert [(p, t) for p, t in oracle_found] == [(path, t) for t, path in found]
    assert plain_value.proto is value.proto


def test_unwrap_plain_keeps_identity():
    from gadgetforge.interpreter import Interpreter

    interp = Interpreter(CORPUS)
    obj = interp.new_object({"x": interp.new_array(["a"])})
    assert unwrap_deep(obj)[0] is obj
    assert unwrap_deep("hello") == ("hello", [])


@st.composite
def wrapped_values(draw, depth=3):
    from gadgetforge.interpreter import Interpreter

    interp = Interpreter(CORPUS)

    def build(d):
        choice = draw(st.integers(0, 4 if d > 0 else 1))
        if choice == 0:
            return draw(st.one_of(st.text(max_size=3), st.floats(allow_nan=False), st.booleans()))
        if choice == 1:
            return make(draw(st.text(max_size=3)), TEXT)
        if choice == 2:
            return interp.new_array([build(d - 1) for _ in range(draw(st.integers(0, 3)))])
        if choice == 3:
            keys = draw(st.lists(st.sampled_from("abcd"), unique=True, max_size=3))
            return interp.new_object({k: build(d - 1) for k in keys})
        return make(build(d - 1), UNKNOWN)

    return build(depth)


@settings(max_examples=200, deadline=None)
@given(wrapped_values())
def test_unwrap_idempotent_and_agrees_with_oracle(value):
    plain_value, found = unwrap_deep(value)
    assert unwrap_deep(plain_value)[1] == []
    oracle_plain, oracle_found = structural_unwrap(value)
    assert to_python(plain_value) == oracle_plain
    assert [p for p, _ in oracle_found] == [path for _, path in found]


def test_flows_start_with_read_at_source():
    src = (CORPUS / "csv-writer" / "index.mjs.txt").read_text() + '\nlet w = csvWriter(); w.write({a: "1", b: "2"});'
    _, obs, _ = tainted(src)
    assert obs.taints
    for taint in obs.taints:
        assert taint.flow[0].kind == "Read"
        assert taint.flow[0].loc == taint.source.loc
