"""Runtime values: booleans, reals, angles, 2-D points, object handles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ..lang.ast import wrap_angle


class ValueKindError(Exception):
    """A value of the wrong kind reached an operation."""


@dataclass(frozen=True)
class Angle:
    radians: float

    def __post_init__(self):
        object.__setattr__(self, "radians", wrap_angle(self.radians))


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class ObjectRef:
    id: str


Value = Union[bool, float, int, Angle, Point, ObjectRef]


def value_kind(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, (int, float)):
        return "scalar"
    if isinstance(v, Angle):
        return "angle"
    if isinstance(v, Point):
        return "point"
    if isinstance(v, ObjectRef):
        return "object"
    raise ValueKindError(f"not a runtime value: {v!r}")


def delta_between(a: Value, b: Value) -> tuple[float, str]:
    """Distance between two same-kind values, plus the kind name."""
    ka, kb = value_kind(a), value_kind(b)
    if ka != kb:
        raise ValueKindError(f"cannot compare {ka} with {kb}")
    if ka == "angle":
        return abs(wrap_angle(a.radians - b.radians)), "angle"
    if ka == "point":
        return math.hypot(a.x - b.x, a.y - b.y), "point"
    if ka == "scalar":
        return abs(a - b), "scalar"
    raise ValueKindError(f"{ka} values have no distance")


def value_to_json(v: Value):
    if isinstance(v, bool) or isinstance(v, (int, float)):
        return v
    if isinstance(v, Angle):
        return {"angle": v.radians}
    if isinstance(v, Point):
        return {"point": [v.x, v.y]}
    if isinstance(v, ObjectRef):
        return {"object": v.id}
    raise ValueKindError(f"not a runtime value: {v!r}")


def value_from_json(doc) -> Value:
    if isinstance(doc, (bool, int, float)):
        return doc
    if isinstance(doc, dict):
        if "angle" in doc:
            return Angle(float(doc["angle"]))
        if "point" in doc:
            x, y = doc["point"]
            return Point(float(x), float(y))
        if "object" in doc:
            return ObjectRef(str(doc["object"]))
        if "number" in doc:
            return float(doc["number"])
    raise ValueKindError(f"not a value document: {doc!r}")
