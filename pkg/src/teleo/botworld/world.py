"""Deterministic fixed-timestep 2-D world: unicycle robots, graspable
bars, circular obstacles.

One step applies a single action increment per robot (in robot-id order),
then the step's exogenous events (in injection order), then advances the
tick counter.  Blocked move increments truncate at contact rather than
penetrate or fail: an action pressing into an obstacle simply stalls, and
the controlling program's conditions are what get the robot unstuck.
All randomness (execution and sensing noise) flows through the caller's
seeded generator, so identical inputs replay bit-identically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..lang.ast import wrap_angle
from ..runtime.machine import ActionCommand
from ..runtime.values import ObjectRef, Point
from . import geometry as geo
from .events import (
    AddObstacle,
    Event,
    ForceRelease,
    MoveObject,
    RemoveObject,
    SetEntryArg,
    TeleportRobot,
    UnknownObjectError,
)


class UnknownRobotError(Exception):
    pass


@dataclass
class Robot:
    id: str
    position: Point
    heading: float
    radius: float = 0.5
    holding: Optional[str] = None
    # Held-bar endpoints in the robot frame; rebuilt at grab/load time.
    grip: Optional[tuple[Point, Point]] = field(default=None, repr=False)


@dataclass
class Bar:
    id: str
    p: Point
    q: Point
    half_width: float = 0.25

    @property
    def center(self) -> Point:
        return Point((self.p.x + self.q.x) / 2.0, (self.p.y + self.q.y) / 2.0)

    @property
    def axis(self) -> Point:
        return geo.unit(geo.sub(self.q, self.p))


@dataclass
class Obstacle:
    id: str
    center: Point
    radius: float


@dataclass
class WorldParams:
    v: float = 1.0  # units/s
    omega: float = math.pi / 2  # rad/s, counter-clockwise
    dt: float = 0.05  # s
    reach: float = 1.0  # units
    clearance: float = 0.5  # planning margin, units


@dataclass
class NoiseConfig:
    exec_p: float = 0.0  # per-tick chance an increment goes rogue
    sense_sigma: float = 0.0  # gaussian noise on sensed pose


@dataclass
class StepLog:
    notes: list[str] = field(default_factory=list)
    applied: list[Event] = field(default_factory=list)
    changed_bars: set[str] = field(default_factory=set)
    changed_obstacles: set[str] = field(default_factory=set)
    added: set[str] = field(default_factory=set)
    removed: set[str] = field(default_factory=set)


class World:
    def __init__(
        self,
        params: WorldParams,
        robots: Sequence[Robot] = (),
        bars: Sequence[Bar] = (),
        obstacles: Sequence[Obstacle] = (),
    ):
        self.params = params
        self.robots: dict[str, Robot] = {r.id: r for r in sorted(robots, key=lambda r: r.id)}
        self.bars: dict[str, Bar] = {b.id: b for b in bars}
        self.obstacles: dict[str, Obstacle] = {o.id: o for o in obstacles}
        self.tick = 0
        ids = list(self.robots) + list(self.bars) + list(self.obstacles)
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique across robots, bars and obstacles")
        for robot in self.robots.values():
            if robot.holding is not None:
                if robot.holding not in self.bars:
                    raise UnknownObjectError(f"robot {robot.id!r} holds unknown {robot.holding!r}")
                robot.grip = _grip_of(robot, self.bars[robot.holding])

    def robot_order(self) -> list[str]:
        return sorted(self.robots)

    def object_ids(self) -> list[str]:
        return list(self.robots) + list(self.bars) + list(self.obstacles)

    def blockers_for(self, robot: Robot):
        """Obstacles plus bars not held by anyone."""
        held = {r.holding for r in self.robots.values() if r.holding is not None}
        for obs in self.obstacles.values():
            yield obs
        for bar in self.bars.values():
            if bar.id not in held:
                yield bar

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "params": {
                "v": self.params.v,
                "omega": self.params.omega,
                "dt": self.params.dt,
                "reach": self.params.reach,
                "clearance": self.params.clearance,
            },
            "robots": [
                {
                    "id": r.id,
                    "position": [r.position.x, r.position.y],
                    "heading": r.heading,
                    "radius": r.radius,
                    "holding": r.holding,
                }
                for r in self.robots.values()
            ],
            "bars": [
                {
                    "id": b.id,
                    "p": [b.p.x, b.p.y],
                    "q": [b.q.x, b.q.y],
                    "half_width": b.half_width,
                }
                for b in self.bars.values()
            ],
            "obstacles": [
                {"id": o.id, "center": [o.center.x, o.center.y], "radius": o.radius}
                for o in self.obstacles.values()
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "World":
        p = doc.get("params", {})
        params = WorldParams(
            v=float(p.get("v", 1.0)),
            omega=float(p.get("omega", math.pi / 2)),
            dt=float(p.get("dt", 0.05)),
            reach=float(p.get("reach", 1.0)),
            clearance=float(p.get("clearance", 0.5)),
        )
        if params.dt <= 0:
            raise ValueError("dt must be positive")
        robots = [
            Robot(
                r["id"],
                Point(*map(float, r["position"])),
                wrap_angle(float(r.get("heading", 0.0))),
                radius=float(r.get("radius", 0.5)),
                holding=r.get("holding"),
            )
            for r in doc.get("robots", [])
        ]
        bars = [
            Bar(
                b["id"],
                Point(*map(float, b["p"])),
                Point(*map(float, b["q"])),
                half_width=float(b.get("half_width", 0.25)),
            )
            for b in doc.get("bars", [])
        ]
        obstacles = [
            Obstacle(o["id"], Point(*map(float, o["center"])), float(o["radius"]))
            for o in doc.get("obstacles", [])
        ]
        for r in robots:
            if r.radius <= 0:
                raise ValueError("robot radius must be positive")
        for o in obstacles:
            if o.radius <= 0:
                raise ValueError("obstacle radius must be positive")
        return cls(params, robots, bars, obstacles)


def _grip_of(robot: Robot, bar: Bar) -> tuple[Point, Point]:
    """Bar endpoints expressed in the robot's frame."""
    c, s = math.cos(-robot.heading), math.sin(-robot.heading)

    def to_local(w: Point) -> Point:
        d = geo.sub(w, robot.position)
        return Point(c * d.x - s * d.y, s * d.x + c * d.y)

    return to_local(bar.p), to_local(bar.q)


def _carry_bar(world: World, robot: Robot, log: StepLog) -> None:
    if robot.holding is None or robot.grip is None:
        return
    bar = world.bars.get(robot.holding)
    if bar is None:
        robot.holding, robot.grip = None, None
        return
    c, s = math.cos(robot.heading), math.sin(robot.heading)

    def to_world(l: Point) -> Point:
        return Point(robot.position.x + c * l.x - s * l.y, robot.position.y + s * l.x + c * l.y)

    bar.p, bar.q = to_world(robot.grip[0]), to_world(robot.grip[1])
    log.changed_bars.add(bar.id)


def _move_increment(world: World, robot: Robot, direction: float, magnitude: float) -> Point:
    """Advance up to ``magnitude`` along ``direction``, stopping at contact."""
    d = geo.heading_vector(direction)
    allowed = magnitude
    for blocker in world.blockers_for(robot):
        if isinstance(blocker, Obstacle):
            t = geo.sweep_circle_contact(
                robot.position, d, allowed, blocker.center, blocker.radius + robot.radius
            )
        else:
            t = geo.sweep_capsule_contact(
                robot.position, d, allowed, blocker.p, blocker.q, blocker.half_width + robot.radius
            )
        allowed = min(allowed, t)
        if allowed <= 0:
            return robot.position
    return geo.add(robot.position, geo.scale(d, allowed))


def _facing(robot: Robot, target: Point) -> float:
    return abs(wrap_angle(robot.heading - geo.course(robot.position, target).radians))


def _apply_command(
    world: World,
    robot: Robot,
    cmd: ActionCommand,
    rng: random.Random,
    noise: NoiseConfig,
    grab_facing_tol: float,
    log: StepLog,
) -> None:
    params = world.params
    if cmd.is_nil:
        return
    if cmd.name == "move":
        direction = robot.heading
        if noise.exec_p > 0 and rng.random() < noise.exec_p:
            direction = rng.uniform(-math.pi, math.pi)
        robot.position = _move_increment(world, robot, direction, params.v * params.dt)
        _carry_bar(world, robot, log)
        return
    if cmd.name == "rotate":
        delta = params.omega * params.dt
        if noise.exec_p > 0 and rng.random() < noise.exec_p:
            delta = -delta if rng.random() < 0.5 else delta
        robot.heading = wrap_angle(robot.heading + delta)
        _carry_bar(world, robot, log)
        return
    if cmd.name == "grab-bar":
        target = cmd.args[0] if cmd.args else None
        bar_id = target.id if isinstance(target, ObjectRef) else target
        bar = world.bars.get(bar_id)
        if bar is None:
            log.notes.append(f"grab-failed:{robot.id}:unknown-bar:{bar_id}")
            return
        if geo.dist(robot.position, bar.center) > params.reach:
            log.notes.append(f"grab-failed:{robot.id}:{bar.id}:out-of-reach")
            return
        if _facing(robot, bar.center) > grab_facing_tol:
            log.notes.append(f"grab-failed:{robot.id}:{bar.id}:not-facing")
            return
        robot.holding = bar.id
        robot.grip = _grip_of(robot, bar)
        return
    if cmd.name == "release-bar":
        robot.holding, robot.grip = None, None
        return
    log.notes.append(f"unknown-primitive:{robot.id}:{cmd.name}")


def _apply_event(world: World, ev: Event, log: StepLog) -> None:
    if isinstance(ev, MoveObject):
        if ev.id in world.bars:
            bar = world.bars[ev.id]
            if ev.p is None or ev.q is None:
                raise UnknownObjectError(f"move_object on bar {ev.id!r} needs p and q")
            for robot in world.robots.values():
                if robot.holding == ev.id:
                    robot.holding, robot.grip = None, None
                    log.notes.append(f"released:{robot.id}:{ev.id}:moved-away")
            bar.p, bar.q = ev.p, ev.q
            log.changed_bars.add(ev.id)
        elif ev.id in world.obstacles:
            if ev.center is None:
                raise UnknownObjectError(f"move_object on obstacle {ev.id!r} needs center")
            world.obstacles[ev.id].center = ev.center
            log.changed_obstacles.add(ev.id)
        else:
            raise UnknownObjectError(f"no movable object {ev.id!r}")
    elif isinstance(ev, AddObstacle):
        if ev.id in world.object_ids():
            raise UnknownObjectError(f"id {ev.id!r} already exists")
        world.obstacles[ev.id] = Obstacle(ev.id, ev.center, ev.radius)
        log.added.add(ev.id)
    elif isinstance(ev, RemoveObject):
        if ev.id in world.bars:
            for robot in world.robots.values():
                if robot.holding == ev.id:
                    robot.holding, robot.grip = None, None
            del world.bars[ev.id]
        elif ev.id in world.obstacles:
            del world.obstacles[ev.id]
        else:
            raise UnknownObjectError(f"no removable object {ev.id!r}")
        log.removed.add(ev.id)
    elif isinstance(ev, TeleportRobot):
        robot = world.robots.get(ev.id)
        if robot is None:
            raise UnknownObjectError(f"no robot {ev.id!r}")
        robot.position = ev.position
        robot.heading = wrap_angle(ev.heading)
        _carry_bar(world, robot, log)
    elif isinstance(ev, ForceRelease):
        robot = world.robots.get(ev.id)
        if robot is None:
            raise UnknownObjectError(f"no robot {ev.id!r}")
        robot.holding, robot.grip = None, None
    elif isinstance(ev, SetEntryArg):
        raise TypeError("set_entry_arg is applied by the scenario runner")
    else:
        raise TypeError(f"not an event: {ev!r}")
    log.applied.append(ev)


def world_step(
    world: World,
    commands: Mapping[str, ActionCommand],
    events: Sequence[Event],
    rng: random.Random,
    noise: Optional[NoiseConfig] = None,
    grab_facing_tol: float = math.radians(4.0),
) -> StepLog:
    """Apply one action increment per robot, then the due events, then
    advance the tick."""
    noise = noise or NoiseConfig()
    log = StepLog()
    for rid in commands:
        if rid not in world.robots:
            raise UnknownRobotError(f"no robot {rid!r}")
    for rid in world.robot_order():
        cmd = commands.get(rid)
        if cmd is None:
            continue
        _apply_command(world, world.robots[rid], cmd, rng, noise, grab_facing_tol, log)
    for ev in events:
        _apply_event(world, ev, log)
    world.tick += 1
    return log
