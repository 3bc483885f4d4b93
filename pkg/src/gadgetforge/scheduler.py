"""Forced branch execution: which properties to force in the next run.

Properties are forced one seed at a time, in the order their tainted
conditionals were first seen. When forcing reveals conditionals on new
properties, they join the current group and the group is re-run until no
new properties appear.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .taint.records import FORCED, UNINTRUSIVE, BranchRecord, RunPlan

DEFAULT_MAX_RUNS = 25


@dataclass
class RunResult:
    """What one run (all test commands under one plan) produced."""

    plan: RunPlan
    records: list
    hits: list
    candidates: dict = field(default_factory=dict)
    statuses: list = field(default_factory=list)


@dataclass
class AnalysisState:
    worklist: deque = field(default_factory=deque)
    processed: set = field(default_factory=set)
    records: dict = field(default_factory=dict)  # key -> BranchRecord (first seen)
    hits: list = field(default_factory=list)
    candidates: dict = field(default_factory=dict)
    run_count: int = 0
    max_runs: int = DEFAULT_MAX_RUNS
    group: frozenset | None = None
    plans: list = field(default_factory=list)

    def check(self) -> None:
        assert not (set(self.worklist) & self.processed), "worklist and processed overlap"
        assert self.run_count <= self.max_runs, "run budget exceeded"


def _props_in_order(records: list) -> list:
    seen: dict[str, None] = {}
    for record in records:
        for prop in sorted(record.properties):
            seen.setdefault(prop, None)
    return list(seen)


def _merge_candidates(state: AnalysisState, candidates: dict) -> None:
    for prop, cand in candidates.items():
        state.candidates.setdefault(prop, cand)


def _absorb_records(state: AnalysisState, records: list) -> list:
    new = []
    for record in records:
        if record.key not in state.records:
            state.records[record.key] = record
            new.append(record)
    return new


def unintrusive_plan() -> RunPlan:
    return RunPlan(0, UNINTRUSIVE)


def seed_from_unintrusive(result: RunResult, max_runs: int = DEFAULT_MAX_RUNS) -> AnalysisState:
    state = AnalysisState(max_runs=max_runs)
    state.run_count = 1
    state.plans.append(result.plan)
    _absorb_records(state, result.records)
    state.hits.extend(result.hits)
    _merge_candidates(state, result.candidates)
    state.worklist.extend(_props_in_order(result.records))
    return state


def _plan(state: AnalysisState, props: frozenset) -> RunPlan:
    cands = {p: state.candidates[p] for p in sorted(props) if p in state.candidates}
    return RunPlan(state.run_count, FORCED, props, cands)


def next_plan(state: AnalysisState) -> RunPlan | None:
    """The next forced plan, or None when the analysis is done."""
    if state.run_count >= state.max_runs:
        return None
    if state.group is not None:
        return _plan(state, state.group)
    while state.worklist:
        head = state.worklist.popleft()
        if head in state.processed:
            continue
        state.group = frozenset({head})
        return _plan(state, state.group)
    return None


def absorb(state: AnalysisState, result: RunResult) -> None:
    """Fold a forced run's result into the state and decide about expansion."""
    state.run_count += 1
    state.plans.append(result.plan)
    state.hits.extend(result.hits)
    _merge_candidates(state, result.candidates)
    new_records = _absorb_records(state, result.records)
    group = state.group or frozenset()
    new_props = []
    for prop in _props_in_order(new_records):
        if prop not in state.processed and prop not in group:
            new_props.append(prop)
    if new_props:
        state.group = group | frozenset(new_props)
        state.worklist = deque(p for p in state.worklist if p not in state.group)
    else:
        state.processed |= group
        state.group = None
        state.worklist = deque(p for p in state.worklist if p not in state.processed)
    state.check()


def all_records(state: AnalysisState) -> list[BranchRecord]:
    return list(state.records.values())
