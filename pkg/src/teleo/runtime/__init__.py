"""Execution engine: values, environment interface, tick machine."""

from .env import EnvError, EnvProvider, HystereticReading, ScriptedEnv
from .machine import (
    ActionCommand,
    ActivationTrace,
    EntryArityError,
    Frame,
    LevelRecord,
    Lit,
    Machine,
    NoApplicableRule,
    NotStartedError,
    RecursionLimitError,
    RuntimeConfig,
    TickError,
    Tolerances,
    UnknownEntryError,
    select_tree_node,
)
from .values import (
    Angle,
    ObjectRef,
    Point,
    Value,
    ValueKindError,
    delta_between,
    value_from_json,
    value_kind,
    value_to_json,
)

__all__ = [
    "ActionCommand",
    "ActivationTrace",
    "Angle",
    "EntryArityError",
    "EnvError",
    "EnvProvider",
    "Frame",
    "HystereticReading",
    "LevelRecord",
    "Lit",
    "Machine",
    "NoApplicableRule",
    "NotStartedError",
    "ObjectRef",
    "Point",
    "RecursionLimitError",
    "RuntimeConfig",
    "ScriptedEnv",
    "TickError",
    "Tolerances",
    "UnknownEntryError",
    "Value",
    "ValueKindError",
    "delta_between",
    "select_tree_node",
    "value_from_json",
    "value_kind",
    "value_to_json",
]
