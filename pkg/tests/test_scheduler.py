from hypothesis import given, settings, strategies as st

from gadgetforge.frontend import SourceLocation
from gadgetforge.pipeline import AnalysisConfig, analyze_package, execute_plan
from gadgetforge.pipeline.manifest import PackageManifest
from gadgetforge.scheduler import (
    AnalysisState,
    RunResult,
    absorb,
    next_plan,
    seed_from_unintrusive,
    unintrusive_plan,
)
from gadgetforge.taint.records import FORCED, UNINTRUSIVE, BranchRecord, RunPlan

from helpers import CORPUS, tainted


def record(props, line=1, natural=False, run=0):
    return BranchRecord(SourceLocation("m", line, 1, line, line + 1), frozenset(props), natural, run)


def result(plan, records, hits=()):
    return RunResult(plan, list(records), list(hits))


def test_seed_worklist_first_seen_order():
    state = seed_from_unintrusive(result(unintrusive_plan(), [record({"p"}, 1), record({"q"}, 2), record({"p"}, 3)]))
    assert list(state.worklist) == ["p", "q"]
    assert state.processed == set() and state.run_count == 1


def test_no_records_means_done():
    state = seed_from_unintrusive(result(unintrusive_plan(), []))
    assert next_plan(state) is None


def test_single_forced_run_then_done():
    state = seed_from_unintrusive(result(unintrusive_plan(), [record({"newProcess"})]))
    plan = next_plan(state)
    assert plan.mode == FORCED and plan.forced_props == frozenset({"newProcess"})
    absorb(state, result(plan, [record({"newProcess"})]))
    assert next_plan(state) is None
    assert state.run_count == 2 and state.processed == {"newProcess"}


def test_expansion_to_new_property():
    state = seed_from_unintrusive(result(unintrusive_plan(), [record({"p"})]))
    plan = next_plan(state)
    absorb(state, result(plan, [record({"p"}), record({"q"}, 2, run=1)]))
    plan = next_plan(state)
    assert plan.forced_props == frozenset({"p", "q"})
    absorb(state, result(plan, [record({"p"}), record({"q"}, 2)]))
    assert next_plan(state) is None
    assert state.processed == {"p", "q"}


def test_max_runs_one_stops_after_unintrusive():
    state = seed_from_unintrusive(result(unintrusive_plan(), [record({"p"})]), max_runs=1)
    assert next_plan(state) is None


def test_candidates_travel_with_plan():
    res = result(unintrusive_plan(), [record({"mode"})])
    res.candidates = {"mode": ("fast", "Text")}
    state = seed_from_unintrusive(res)
    assert next_plan(state).candidates == {"mode": ("fast", "Text")}


def test_forced_candidate_sets_underlying():
    src = 'let opts = {}; let r = "slow";\nif (opts.mode === "fast") { r = opts.mode; }\nstd.kept = r;'
    _, obs, interp = tainted(src, forced={"mode"}, candidates={"mode": ("fast", "Text")})
    assert interp.globals.vars["std"].props["kept"].underlying == "fast"


def test_plan_round_trips_through_json():
    plan = RunPlan(3, FORCED, frozenset({"a", "b"}), {"a": ("x", "Text")})
    assert RunPlan.from_dict(plan.to_dict()) == plan
    assert unintrusive_plan().mode == UNINTRUSIVE and not unintrusive_plan().forced_props


# -- simulated discovery graphs --------------------------------------------------------

PROPS = list("abcdefg")


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.sampled_from(PROPS), unique=True, max_size=4),
    st.dictionaries(st.sampled_from(PROPS), st.lists(st.sampled_from(PROPS), unique=True, max_size=3)),
    st.integers(1, 30),
)
def test_termination_and_invariants(seeds, reveals, max_runs):
    """Forcing a set reveals conditionals on reveals[p] for each forced p."""
    line = iter(range(1, 10_000))
    lines = {}

    def rec(p):
        if p not in lines:
            lines[p] = next(line)
        return record({p}, lines[p])

    state = seed_from_unintrusive(result(unintrusive_plan(), [rec(p) for p in seeds]), max_runs)
    seen_groups = []
    while (plan := next_plan(state)) is not None:
        assert plan.mode == FORCED and plan.forced_props
        seen_groups.append(plan.forced_props)
        revealed = [rec(q) for p in sorted(plan.forced_props) for q in reveals.get(p, [])]
        absorb(state, result(plan, [rec(p) for p in plan.forced_props] + revealed))
        state.check()
        assert not (set(state.worklist) & state.processed)
        assert state.run_count <= max_runs
    assert state.run_count <= max_runs
    distinct = {p for g in seen_groups for p in g} | set(seeds)
    # each property enters a group as a seed at most once, and each expansion adds a property
    assert state.run_count <= 1 + 2 * len(distinct)
    if state.run_count < max_runs:
        assert not state.worklist and state.group is None


# -- on the corpus -------------------------------------------------------------------------


def test_two_branch_worklist_order():
    config = AnalysisConfig()
    manifest = PackageManifest.load(CORPUS / "two-branch")
    res, _ = execute_plan(CORPUS / "two-branch", config.strategy.allowed_commands(manifest.test_commands), unintrusive_plan(), config)
    state = seed_from_unintrusive(res)
    assert list(state.worklist) == ["p", "q"]


def test_scheduler_package_expands_and_finds_sink():
    report = analyze_package(CORPUS / "scheduler").report
    plans = [sorted(m["plan"]["forcedProps"]) for m in report.runs_meta]
    assert plans == [[], ["p"], ["p", "q"]]
    (hit,) = report.hits
    assert hit["forcedProps"] == ["p", "q"] and hit["sink"] == "child_process.exec"


def test_forced_hits_carry_plan_props_and_superset_of_unintrusive():
    report = analyze_package(CORPUS / "gadget-example").report
    for hit in report.hits:
        for occ in hit["occurrences"]:
            plan = report.runs_meta[occ["run"]]["plan"]
            assert occ["forcedProps"] == plan["forcedProps"]


def test_replaying_a_stored_plan_is_reproducible():
    report = analyze_package(CORPUS / "nodemailer-shaped").report
    config = AnalysisConfig()
    commands = ["run test/test.mjs.txt"]
    for meta in report.runs_meta:
        plan = RunPlan.from_dict(meta["plan"])
        a, _ = execute_plan(CORPUS / "nodemailer-shaped", commands, plan, config)
        b, _ = execute_plan(CORPUS / "nodemailer-shaped", commands, plan, config)
        assert [h.to_dict() for h in a.hits] == [h.to_dict() for h in b.hits]
