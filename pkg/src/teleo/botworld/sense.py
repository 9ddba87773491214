"""Per-robot sensing: environment bindings for the control machine.

Every object's true pose is observable; optional gaussian noise perturbs
only the robot's own sensed position and heading, snapshotted once per
tick so all derived predicates see one consistent pose.  The bar
predicates answer with raw distance readings plus thresholds, so their
truth runs through the same per-frame switch state as explicit proximity
tests.
"""

from __future__ import annotations

import math
import random
from typing import Mapping, Optional, Sequence

from ..lang.ast import wrap_angle
from ..runtime.env import EnvError, HystereticReading
from ..runtime.machine import Tolerances
from ..runtime.values import Angle, ObjectRef, Point, Value
from . import geometry as geo
from .world import Bar, World

# The stretch of a bar's perpendicular bisector, measured from the bar
# center on the robot's side, from which approaching the bar head-on is
# sensible.
ZONE_NEAR = 2.0
ZONE_FAR = 6.0

# Band (enter, hold) for "on the bisector line", world units.
MIDLINE_BAND = (0.2, 0.4)

# Band for "close enough to grab", as fractions of reach.
BAR_CENTER_BAND = (0.9, 1.1)

STANDARD_SYMBOLS: dict[str, int] = {
    "position": 0,
    "heading": 0,
    "course": 2,
    "clear-path": 2,
    "new-point": 2,
    "is-grabbing": 1,
    "facing-bar": 1,
    "at-bar-center": 1,
    "on-bar-midline": 1,
    "facing-midline-zone": 1,
}


class NoBlockerError(EnvError):
    """new-point asked for a detour around a clear path."""


def clear_path(world: World, p1: Point, p2: Point, rho: float) -> bool:
    """Is the straight segment, inflated by robot radius + clearance,
    free of obstacles and unheld bars?"""
    margin = rho + world.params.clearance
    held = {r.holding for r in world.robots.values() if r.holding is not None}
    for obs in world.obstacles.values():
        if geo.seg_point_distance(p1, p2, obs.center) < obs.radius + margin:
            return False
    for bar in world.bars.values():
        if bar.id in held:
            continue
        if geo.seg_seg_distance(p1, p2, bar.p, bar.q) < bar.half_width + margin:
            return False
    return True


def _blocker_entry(world: World, p1: Point, p2: Point, rho: float):
    """Blockers on the inflated segment, keyed by where it first meets them."""
    margin = rho + world.params.clearance
    length = geo.dist(p1, p2)
    if length < geo.EPS:
        return []
    d = geo.unit(geo.sub(p2, p1))
    held = {r.holding for r in world.robots.values() if r.holding is not None}
    hits = []
    for obs in world.obstacles.values():
        if geo.seg_point_distance(p1, p2, obs.center) < obs.radius + margin:
            t = geo.sweep_circle_contact(p1, d, length, obs.center, obs.radius + margin)
            hits.append((t, obs))
    for bar in world.bars.values():
        if bar.id in held:
            continue
        if geo.seg_seg_distance(p1, p2, bar.p, bar.q) < bar.half_width + margin:
            t = geo.sweep_capsule_contact(p1, d, length, bar.p, bar.q, bar.half_width + margin)
            hits.append((t, bar))
    hits.sort(key=lambda h: h[0])
    return hits


def new_point(world: World, p1: Point, p2: Point, rho: float) -> Point:
    """A waypoint beside the first blocker of the p1->p2 path.

    The primary candidate offsets perpendicular to the path from the
    blocker's reference point (circle center, or the bar's point closest
    to the path), on the side the blocker is not, far enough to pass with
    margin.  The candidate's projection onto the path is the blocking
    point itself, so it is never closer to p1 than that point; when it is
    not reachable on a clear path either (cluttered scenes, or a start
    right at the margin), it is pulled toward p1 until one guarantee
    holds: the result is reachable on a clear path, or strictly closer to
    p1 than the blocking point.  Either way recursive replanning makes
    progress.
    """
    hits = _blocker_entry(world, p1, p2, rho)
    if not hits:
        raise NoBlockerError(f"path {p1} -> {p2} is already clear")
    _, blocker = hits[0]
    d = geo.unit(geo.sub(p2, p1))
    if isinstance(blocker, Bar):
        # Reference: the bar's closest approach to the path.
        best = None
        for candidate in (blocker.p, blocker.q):
            on_path, _ = geo.seg_closest_point(p1, p2, candidate)
            gap = geo.dist(on_path, candidate)
            if best is None or gap < best[0]:
                best = (gap, candidate)
        for candidate, _t in (geo.seg_closest_point(blocker.p, blocker.q, p1),
                              geo.seg_closest_point(blocker.p, blocker.q, p2)):
            on_path, _ = geo.seg_closest_point(p1, p2, candidate)
            gap = geo.dist(on_path, candidate)
            if gap < best[0]:
                best = (gap, candidate)
        ref = best[1]
        radius = blocker.half_width
    else:
        ref = blocker.center
        radius = blocker.radius
    side = geo.cross(d, geo.sub(ref, p1))
    perp = geo.left_perp(d)
    if side > 0:  # blocker to the left: go right
        perp = geo.scale(perp, -1.0)
    offset = radius + rho + 2.0 * world.params.clearance
    candidate = geo.add(ref, geo.scale(perp, offset))
    blocking_point, _ = geo.seg_closest_point(p1, p2, ref)
    threshold = geo.dist(p1, blocking_point)
    for _ in range(24):
        if clear_path(world, p1, candidate, rho):
            return candidate
        if geo.dist(p1, candidate) < threshold:
            return candidate
        candidate = Point((p1.x + candidate.x) / 2.0, (p1.y + candidate.y) / 2.0)
    return candidate


def _zone_segment(bar: Bar, robot_pos: Point) -> tuple[Point, Point]:
    """The approach stretch of the bar's bisector on the robot's side."""
    m = geo.left_perp(bar.axis)
    if geo.dot(geo.sub(robot_pos, bar.center), m) < 0:
        m = geo.scale(m, -1.0)
    return (
        geo.add(bar.center, geo.scale(m, ZONE_NEAR)),
        geo.add(bar.center, geo.scale(m, ZONE_FAR)),
    )


def zone_gap(position: Point, heading: float, bar: Bar) -> float:
    """Angular distance from the heading ray to the approach stretch;
    zero when the ray already meets it."""
    z1, z2 = _zone_segment(bar, position)
    hv = geo.heading_vector(heading)
    if geo.ray_segment_hit(position, hv, z1, z2):
        return 0.0
    gaps = []
    for z in (z1, z2):
        if geo.dist(position, z) < 1e-9:
            return 0.0
        a = geo.course(position, z).radians
        gaps.append(abs(wrap_angle(heading - a)))
    return min(gaps)


class BotworldEnv:
    """Environment provider backed by one world, for one robot."""

    def __init__(self, world: World, robot_id: str, tolerances: Optional[Tolerances] = None):
        if robot_id not in world.robots:
            raise EnvError(f"no robot {robot_id!r}")
        self.world = world
        self.robot_id = robot_id
        self.tolerances = tolerances or Tolerances()
        robot = world.robots[robot_id]
        self._position = robot.position
        self._heading = robot.heading

    def begin_tick(self, rng: Optional[random.Random] = None, sense_sigma: float = 0.0) -> None:
        """Snapshot the (possibly noisy) pose for this tick's resolutions."""
        robot = self.world.robots[self.robot_id]
        if sense_sigma > 0 and rng is not None:
            self._position = Point(
                robot.position.x + rng.gauss(0.0, sense_sigma),
                robot.position.y + rng.gauss(0.0, sense_sigma),
            )
            self._heading = wrap_angle(robot.heading + rng.gauss(0.0, sense_sigma))
        else:
            self._position = robot.position
            self._heading = robot.heading

    def declared(self) -> Mapping[str, int]:
        table = dict(STANDARD_SYMBOLS)
        for oid in self.world.object_ids():
            table.setdefault(oid, 0)
        return table

    # -- resolution ----------------------------------------------------------

    def _bar(self, v: Value) -> Bar:
        if not isinstance(v, ObjectRef):
            raise EnvError(f"expected an object reference, got {v!r}")
        bar = self.world.bars.get(v.id)
        if bar is None:
            raise EnvError(f"no bar {v.id!r}")
        return bar

    def _points(self, args: Sequence[Value]) -> list[Point]:
        out = []
        for a in args:
            if isinstance(a, Point):
                out.append(a)
            elif isinstance(a, ObjectRef) and a.id in self.world.bars:
                out.append(self.world.bars[a.id].center)
            elif isinstance(a, ObjectRef) and a.id in self.world.obstacles:
                out.append(self.world.obstacles[a.id].center)
            else:
                raise EnvError(f"expected a point, got {a!r}")
        return out

    def resolve(self, name: str, args: Sequence[Value]):
        world = self.world
        robot = world.robots[self.robot_id]
        if name == "position":
            return self._position
        if name == "heading":
            return Angle(self._heading)
        if name == "course":
            p1, p2 = self._points(args)
            try:
                return geo.course(p1, p2)
            except geo.DegenerateCourseError as exc:
                raise EnvError(str(exc)) from None
        if name == "clear-path":
            p1, p2 = self._points(args)
            return clear_path(world, p1, p2, robot.radius)
        if name == "new-point":
            p1, p2 = self._points(args)
            return new_point(world, p1, p2, robot.radius)
        if name == "is-grabbing":
            bar = self._bar(args[0])
            return robot.holding == bar.id
        if name == "facing-bar":
            bar = self._bar(args[0])
            try:
                target = geo.course(self._position, bar.center).radians
            except geo.DegenerateCourseError:
                return HystereticReading(0.0, *self.tolerances.angle)
            delta = abs(wrap_angle(self._heading - target))
            return HystereticReading(delta, *self.tolerances.angle)
        if name == "at-bar-center":
            bar = self._bar(args[0])
            reach = world.params.reach
            return HystereticReading(
                geo.dist(self._position, bar.center),
                BAR_CENTER_BAND[0] * reach,
                BAR_CENTER_BAND[1] * reach,
            )
        if name == "on-bar-midline":
            bar = self._bar(args[0])
            # Distance to the perpendicular bisector = offset along the axis.
            delta = abs(geo.dot(geo.sub(self._position, bar.center), bar.axis))
            return HystereticReading(delta, *MIDLINE_BAND)
        if name == "facing-midline-zone":
            bar = self._bar(args[0])
            return HystereticReading(
                zone_gap(self._position, self._heading, bar), *self.tolerances.angle
            )
        if name in world.robots or name in world.bars or name in world.obstacles:
            if args:
                raise EnvError(f"object id {name!r} takes no arguments")
            return ObjectRef(name)
        raise EnvError(f"cannot resolve {name!r}")
