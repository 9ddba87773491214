"""Exogenous events: world changes not caused by the agents' own actions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..runtime.values import Point, Value, value_from_json, value_to_json


class UnknownObjectError(Exception):
    pass


@dataclass(frozen=True)
class MoveObject:
    id: str
    p: Optional[Point] = None  # bars: both endpoints
    q: Optional[Point] = None
    center: Optional[Point] = None  # obstacles


@dataclass(frozen=True)
class AddObstacle:
    id: str
    center: Point
    radius: float


@dataclass(frozen=True)
class RemoveObject:
    id: str


@dataclass(frozen=True)
class TeleportRobot:
    id: str
    position: Point
    heading: float


@dataclass(frozen=True)
class SetEntryArg:
    """Rebinds one entry argument of a robot's machine; handled by the
    scenario runner, not by the world step."""

    index: int
    value: Value
    robot: Optional[str] = None  # None: the scenario's only robot


@dataclass(frozen=True)
class ForceRelease:
    id: str  # robot id


Event = Union[MoveObject, AddObstacle, RemoveObject, TeleportRobot, SetEntryArg, ForceRelease]


def _point(doc) -> Point:
    return Point(float(doc[0]), float(doc[1]))


def event_from_json(doc: dict) -> Event:
    kind = doc["type"]
    if kind == "move_object":
        pose = doc.get("pose", doc)
        return MoveObject(
            doc["id"],
            p=_point(pose["p"]) if "p" in pose else None,
            q=_point(pose["q"]) if "q" in pose else None,
            center=_point(pose["center"]) if "center" in pose else None,
        )
    if kind == "add_obstacle":
        return AddObstacle(doc["id"], _point(doc["center"]), float(doc["radius"]))
    if kind == "remove_object":
        return RemoveObject(doc["id"])
    if kind == "teleport_robot":
        return TeleportRobot(doc["id"], _point(doc["position"]), float(doc["heading"]))
    if kind == "set_entry_arg":
        return SetEntryArg(int(doc["index"]), value_from_json(doc["value"]), doc.get("robot"))
    if kind == "force_release":
        return ForceRelease(doc["id"])
    raise ValueError(f"unknown event type {kind!r}")


def event_to_json(ev: Event) -> dict:
    if isinstance(ev, MoveObject):
        doc: dict = {"type": "move_object", "id": ev.id}
        if ev.p is not None:
            doc["p"] = [ev.p.x, ev.p.y]
        if ev.q is not None:
            doc["q"] = [ev.q.x, ev.q.y]
        if ev.center is not None:
            doc["center"] = [ev.center.x, ev.center.y]
        return doc
    if isinstance(ev, AddObstacle):
        return {
            "type": "add_obstacle",
            "id": ev.id,
            "center": [ev.center.x, ev.center.y],
            "radius": ev.radius,
        }
    if isinstance(ev, RemoveObject):
        return {"type": "remove_object", "id": ev.id}
    if isinstance(ev, TeleportRobot):
        return {
            "type": "teleport_robot",
            "id": ev.id,
            "position": [ev.position.x, ev.position.y],
            "heading": ev.heading,
        }
    if isinstance(ev, SetEntryArg):
        doc = {"type": "set_entry_arg", "index": ev.index, "value": value_to_json(ev.value)}
        if ev.robot is not None:
            doc["robot"] = ev.robot
        return doc
    if isinstance(ev, ForceRelease):
        return {"type": "force_release", "id": ev.id}
    raise TypeError(f"not an event: {ev!r}")
