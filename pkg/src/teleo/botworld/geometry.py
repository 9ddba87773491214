"""Planar geometry over points, segments, capsules and rays."""

from __future__ import annotations

import math
from typing import Optional

from ..runtime.values import Angle, Point
from ..lang.ast import wrap_angle

EPS = 1e-12


class DegenerateCourseError(Exception):
    """Direction between two coincident points is undefined."""


def sub(a: Point, b: Point) -> Point:
    return Point(a.x - b.x, a.y - b.y)


def add(a: Point, b: Point) -> Point:
    return Point(a.x + b.x, a.y + b.y)


def scale(a: Point, s: float) -> Point:
    return Point(a.x * s, a.y * s)


def dot(a: Point, b: Point) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point, b: Point) -> float:
    return a.x * b.y - a.y * b.x


def norm(a: Point) -> float:
    return math.hypot(a.x, a.y)


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def unit(a: Point) -> Point:
    n = norm(a)
    if n < EPS:
        raise ZeroDivisionError("zero-length vector")
    return Point(a.x / n, a.y / n)


def left_perp(d: Point) -> Point:
    """Counter-clockwise perpendicular."""
    return Point(-d.y, d.x)


def heading_vector(heading: float) -> Point:
    return Point(math.cos(heading), math.sin(heading))


def course(p1: Point, p2: Point) -> Angle:
    """Direction from p1 toward p2."""
    if dist(p1, p2) < 1e-9:
        raise DegenerateCourseError(f"course undefined between coincident points {p1}")
    return Angle(math.atan2(p2.y - p1.y, p2.x - p1.x))


def seg_closest_point(a: Point, b: Point, p: Point) -> tuple[Point, float]:
    """Closest point on segment ab to p, and its parameter t in [0, 1]."""
    ab = sub(b, a)
    denom = dot(ab, ab)
    if denom < EPS:
        return a, 0.0
    t = max(0.0, min(1.0, dot(sub(p, a), ab) / denom))
    return add(a, scale(ab, t)), t


def seg_point_distance(a: Point, b: Point, p: Point) -> float:
    q, _ = seg_closest_point(a, b, p)
    return dist(q, p)


def line_point_distance(origin: Point, direction: Point, p: Point) -> float:
    """Distance from p to the infinite line through origin along direction."""
    d = unit(direction)
    return abs(cross(d, sub(p, origin)))


def seg_seg_distance(a1: Point, a2: Point, b1: Point, b2: Point) -> float:
    """Distance between two segments (0 when they intersect)."""
    d1 = sub(a2, a1)
    d2 = sub(b2, b1)
    r = sub(a1, b1)
    a = dot(d1, d1)
    e = dot(d2, d2)
    f = dot(d2, r)
    if a < EPS and e < EPS:
        return dist(a1, b1)
    if a < EPS:
        t = max(0.0, min(1.0, f / e))
        return dist(a1, add(b1, scale(d2, t)))
    c = dot(d1, r)
    if e < EPS:
        s = max(0.0, min(1.0, -c / a))
        return dist(add(a1, scale(d1, s)), b1)
    b = dot(d1, d2)
    denom = a * e - b * b
    s = max(0.0, min(1.0, (b * f - c * e) / denom)) if denom > EPS else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = max(0.0, min(1.0, -c / a))
    elif t > 1.0:
        t = 1.0
        s = max(0.0, min(1.0, (b - c) / a))
    return dist(add(a1, scale(d1, s)), add(b1, scale(d2, t)))


def ray_segment_hit(origin: Point, direction: Point, a: Point, b: Point) -> bool:
    """Does the ray from origin along direction meet segment ab?"""
    d = direction
    ab = sub(b, a)
    denom = cross(d, ab)
    ao = sub(a, origin)
    if abs(denom) < EPS:
        # Parallel.  Collinear rays hit when some part of ab lies ahead.
        if abs(cross(d, ao)) > 1e-9:
            return False
        return dot(d, ao) >= 0 or dot(d, sub(b, origin)) >= 0
    t = cross(ao, ab) / denom  # along the ray
    s = cross(ao, d) / denom  # along the segment
    return t >= 0.0 and 0.0 <= s <= 1.0


def sweep_circle_contact(p: Point, direction: Point, step: float, center: Point, radius: float) -> float:
    """Allowed travel (<= step) for a point moving along direction before
    entering the disc; ``step`` when the disc is never entered."""
    if step <= 0:
        return 0.0
    d = unit(direction)
    rel = sub(center, p)
    dist0 = norm(rel)
    proj = dot(rel, d)
    if dist0 <= radius:
        # Already touching or inside: block approach, allow retreat.
        return 0.0 if proj > 0 else step
    if proj <= 0:
        return step
    disc = proj * proj - (dist0 * dist0 - radius * radius)
    if disc <= 0:
        return step
    t_hit = proj - math.sqrt(disc)
    return min(step, max(0.0, t_hit))


def sweep_capsule_contact(
    p: Point, direction: Point, step: float, a: Point, b: Point, radius: float
) -> float:
    """Allowed travel (<= step) before reaching distance ``radius`` from
    segment ab."""
    if step <= 0:
        return 0.0
    d = unit(direction)
    if seg_point_distance(a, b, p) <= radius:
        probe = add(p, scale(d, min(step, 1e-6)))
        return 0.0 if seg_point_distance(a, b, probe) < seg_point_distance(a, b, p) else step
    candidates = [
        sweep_circle_contact(p, d, step, a, radius),
        sweep_circle_contact(p, d, step, b, radius),
    ]
    # Interior face: |perpendicular distance to the ab line| = radius with
    # the foot inside the segment.
    ab = sub(b, a)
    length = norm(ab)
    if length > EPS:
        axis = scale(ab, 1.0 / length)
        n = left_perp(axis)
        g0 = dot(sub(p, a), n)  # signed perpendicular distance at t=0
        dg = dot(d, n)  # change per unit travel
        if abs(dg) > EPS:
            for target in (radius, -radius):
                t = (target - g0) / dg
                if 0.0 <= t <= step:
                    foot = dot(sub(add(p, scale(d, t)), a), axis)
                    if 0.0 <= foot <= length:
                        candidates.append(t)
    return min(candidates + [step])
