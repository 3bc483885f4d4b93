from .api import (
    CATEGORIES,
    REGISTRY,
    HostEnv,
    HostError,
    HostFunction,
    SpecialCondition,
    check_special,
    is_pollutable,
    load_special_table,
    to_json,
)

__all__ = [
    "CATEGORIES",
    "REGISTRY",
    "HostEnv",
    "HostError",
    "HostFunction",
    "SpecialCondition",
    "check_special",
    "is_pollutable",
    "load_special_table",
    "to_json",
]
