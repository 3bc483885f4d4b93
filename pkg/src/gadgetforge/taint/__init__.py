from .analysis import IGNORED_KEYS, RunObservations, TaintAnalysis, unwrap_args
from .model import (
    ARRAY,
    BOOLEAN,
    DELAYED,
    FUNCTION,
    IMMEDIATE,
    NUMBER,
    OBJECT,
    TEXT,
    TYPE_TAGS,
    UNKNOWN,
    FlowStep,
    SourceRecord,
    TaintValue,
    default_value,
    unwrap_deep,
)
from .records import (
    FORCED,
    NAME_MATCHED,
    SPECIAL,
    STANDARD,
    TYPE_DEFAULT,
    UNINTRUSIVE,
    BranchRecord,
    FlowKey,
    RunPlan,
    SinkHit,
)

__all__ = [
    "ARRAY",
    "BOOLEAN",
    "DELAYED",
    "FORCED",
    "FUNCTION",
    "IGNORED_KEYS",
    "IMMEDIATE",
    "NAME_MATCHED",
    "NUMBER",
    "OBJECT",
    "SPECIAL",
    "STANDARD",
    "TEXT",
    "TYPE_DEFAULT",
    "TYPE_TAGS",
    "UNINTRUSIVE",
    "UNKNOWN",
    "BranchRecord",
    "FlowKey",
    "FlowStep",
    "RunObservations",
    "RunPlan",
    "SinkHit",
    "SourceRecord",
    "TaintAnalysis",
    "TaintValue",
    "default_value",
    "unwrap_args",
    "unwrap_deep",
]
