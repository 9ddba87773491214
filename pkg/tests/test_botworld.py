"""World stepping, perception functions, geometric predicates, noise."""

import math
import random

import pytest

from teleo.botworld import (
    Bar,
    BotworldEnv,
    ForceRelease,
    MoveObject,
    NoBlockerError,
    NoiseConfig,
    Obstacle,
    RemoveObject,
    Robot,
    TeleportRobot,
    UnknownObjectError,
    World,
    WorldParams,
    clear_path,
    course,
    new_point,
    world_step,
    zone_gap,
)
from teleo.botworld import geometry as geo
from teleo.botworld.geometry import DegenerateCourseError
from teleo.runtime import ActionCommand, HystereticReading, ObjectRef, Point


def simple_world(**kwargs) -> World:
    robots = kwargs.pop("robots", [Robot("r1", Point(0, 0), 0.0, radius=0.5)])
    return World(WorldParams(**kwargs.pop("params", {})), robots=robots, **kwargs)


def rng0():
    return random.Random(0)


# --- kinematics ------------------------------------------------------------------


def test_move_increment():
    w = simple_world()
    world_step(w, {"r1": ActionCommand("move")}, [], rng0())
    assert w.robots["r1"].position == Point(0.05, 0.0)
    assert w.tick == 1


def test_rotate_wraps_into_halfopen_interval():
    w = simple_world()
    r = w.robots["r1"]
    omega_dt = w.params.omega * w.params.dt
    r.heading = math.pi - omega_dt / 2
    world_step(w, {"r1": ActionCommand("rotate")}, [], rng0())
    assert -math.pi < r.heading <= math.pi
    assert r.heading == pytest.approx(-math.pi + omega_dt / 2)


def test_grab_out_of_reach_logs_note():
    w = simple_world(bars=[Bar("A", Point(5, 0), Point(7, 0))])
    log = world_step(w, {"r1": ActionCommand("grab-bar", (ObjectRef("A"),))}, [], rng0())
    assert w.robots["r1"].holding is None
    assert any(note.startswith("grab-failed") for note in log.notes)


def test_grab_within_reach_and_facing():
    w = simple_world(bars=[Bar("A", Point(0.6, -1), Point(0.6, 1))])
    log = world_step(w, {"r1": ActionCommand("grab-bar", (ObjectRef("A"),))}, [], rng0())
    assert w.robots["r1"].holding == "A"
    assert log.notes == []


def test_held_bar_moves_rigidly():
    w = simple_world(bars=[Bar("A", Point(0.6, -1), Point(0.6, 1))])
    world_step(w, {"r1": ActionCommand("grab-bar", (ObjectRef("A"),))}, [], rng0())
    bar = w.bars["A"]
    r = w.robots["r1"]
    rel_before = (geo.dist(r.position, bar.p), geo.dist(r.position, bar.q))
    for cmd in ("move", "rotate", "move", "move", "rotate"):
        world_step(w, {"r1": ActionCommand(cmd)}, [], rng0())
        rel_after = (geo.dist(r.position, bar.p), geo.dist(r.position, bar.q))
        assert rel_after[0] == pytest.approx(rel_before[0], abs=1e-9)
        assert rel_after[1] == pytest.approx(rel_before[1], abs=1e-9)


def test_blocked_move_truncates_to_contact():
    w = simple_world(obstacles=[Obstacle("o", Point(0.56, 0.0), 0.05)])
    # Contact at distance radius_o + radius_r = 0.55 from the center.
    world_step(w, {"r1": ActionCommand("move")}, [], rng0())
    assert w.robots["r1"].position.x == pytest.approx(0.01, abs=1e-9)
    world_step(w, {"r1": ActionCommand("move")}, [], rng0())
    assert w.robots["r1"].position.x == pytest.approx(0.01, abs=1e-9)  # stalled


def test_kinematic_bound_per_tick():
    rng = random.Random(5)
    w = simple_world()
    params = w.params
    for _ in range(200):
        cmd = rng.choice([ActionCommand("move"), ActionCommand("rotate"), ActionCommand(None)])
        before = w.robots["r1"].position
        heading_before = w.robots["r1"].heading
        world_step(w, {"r1": cmd}, [], rng)
        moved = geo.dist(before, w.robots["r1"].position)
        turned = abs(math.remainder(w.robots["r1"].heading - heading_before, math.tau))
        assert moved <= params.v * params.dt + 1e-12
        assert turned <= params.omega * params.dt + 1e-12


# --- events -----------------------------------------------------------------------


def test_events_apply_in_order_and_count_objects():
    w = simple_world(obstacles=[Obstacle("o1", Point(5, 5), 1.0)])
    assert len(w.obstacles) == 1
    log = world_step(
        w,
        {},
        [RemoveObject("o1"), TeleportRobot("r1", Point(3, 3), 1.0)],
        rng0(),
    )
    assert len(w.obstacles) == 0
    assert w.robots["r1"].position == Point(3, 3)
    assert [type(e).__name__ for e in log.applied] == ["RemoveObject", "TeleportRobot"]


def test_unknown_event_target_raises():
    w = simple_world()
    with pytest.raises(UnknownObjectError):
        world_step(w, {}, [RemoveObject("ghost")], rng0())


def test_force_release_and_move_object():
    w = simple_world(bars=[Bar("A", Point(0.6, -1), Point(0.6, 1))])
    world_step(w, {"r1": ActionCommand("grab-bar", (ObjectRef("A"),))}, [], rng0())
    assert w.robots["r1"].holding == "A"
    world_step(
        w,
        {},
        [ForceRelease("r1"), MoveObject("A", p=Point(8, 8), q=Point(10, 8))],
        rng0(),
    )
    assert w.robots["r1"].holding is None
    assert w.bars["A"].p == Point(8, 8)


# --- course ---------------------------------------------------------------------


def test_course_values():
    assert course(Point(0, 0), Point(0, 5)).radians == pytest.approx(math.pi / 2)
    assert course(Point(0, 0), Point(1, 1)).radians == pytest.approx(math.pi / 4)
    with pytest.raises(DegenerateCourseError):
        course(Point(3, 3), Point(3, 3))


# --- clear_path / new_point --------------------------------------------------------


def test_clear_path_cases():
    empty = simple_world()
    assert clear_path(empty, Point(0, 0), Point(10, 10), 0.5)
    blocked = simple_world(obstacles=[Obstacle("o", Point(5, 5), 2.0)])
    assert not clear_path(blocked, Point(0, 0), Point(10, 10), 0.5)


def test_clear_path_perpendicular_boundary():
    # Threshold distance = r + rho + delta = 2 + 0.5 + 0.5 = 3.
    for offset, expect in ((3.0 - 1e-3, False), (3.0 + 1e-3, True)):
        w = simple_world(obstacles=[Obstacle("o", Point(5.0, offset), 2.0)])
        assert clear_path(w, Point(0, 0), Point(10, 0), 0.5) is expect


def test_clear_path_symmetry():
    rng = random.Random(3)
    for _ in range(200):
        w = simple_world(
            obstacles=[
                Obstacle(f"o{i}", Point(rng.uniform(0, 10), rng.uniform(0, 10)),
                         rng.uniform(0.3, 2.0))
                for i in range(rng.randint(0, 3))
            ]
        )
        p1 = Point(rng.uniform(-2, 12), rng.uniform(-2, 12))
        p2 = Point(rng.uniform(-2, 12), rng.uniform(-2, 12))
        assert clear_path(w, p1, p2, 0.5) == clear_path(w, p2, p1, 0.5)


def test_clear_path_ignores_held_bars():
    w = simple_world(bars=[Bar("A", Point(4, -1), Point(4, 1))])
    assert not clear_path(w, Point(0, 0), Point(10, 0), 0.5)
    w.robots["r1"].holding = "A"
    assert clear_path(w, Point(0, 0), Point(10, 0), 0.5)


def test_new_point_hand_geometry():
    w = simple_world(obstacles=[Obstacle("o", Point(5, 5), 2.0)])
    wp = new_point(w, Point(0, 0), Point(10, 10), 0.5)
    # Center on the segment: offset 3.5 to the left perpendicular.
    assert wp.x == pytest.approx(5 - 3.5 * math.sqrt(2) / 2, abs=1e-6)
    assert wp.y == pytest.approx(5 + 3.5 * math.sqrt(2) / 2, abs=1e-6)
    assert clear_path(w, Point(0, 0), wp, 0.5)


def test_new_point_requires_blocker():
    with pytest.raises(NoBlockerError):
        new_point(simple_world(), Point(0, 0), Point(10, 10), 0.5)


def test_new_point_picks_blocker_nearest_start():
    w = simple_world(
        obstacles=[Obstacle("far", Point(8, 8), 1.0), Obstacle("near", Point(3, 3), 1.0)]
    )
    wp = new_point(w, Point(0, 0), Point(10, 10), 0.5)
    assert geo.dist(wp, Point(3, 3)) == pytest.approx(1.0 + 0.5 + 1.0, abs=1e-9)


def _lerp(a: Point, b: Point, t: float) -> Point:
    return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def _sample_points(obj, k=80):
    if isinstance(obj, Obstacle):
        return [obj.center]
    return [_lerp(obj.p, obj.q, i / k) for i in range(k + 1)]


def _sample_distance_to_object(p: Point, obj) -> float:
    pad = obj.radius if isinstance(obj, Obstacle) else obj.half_width
    return min(math.hypot(p.x - q.x, p.y - q.y) for q in _sample_points(obj)) - pad


def _oracle_blocking_point(w, p1: Point, p2: Point, margin: float) -> Point:
    """Independent recomputation of the blocking point: march along the
    path to find the first object whose inflated region it enters, then
    take the path point closest to that object's reference (circle
    center, or the bar's closest point to the path, found by sampling)."""
    steps = 400
    path = [_lerp(p1, p2, i / steps) for i in range(steps + 1)]
    first = None
    for p in path:
        for obj in list(w.obstacles.values()) + list(w.bars.values()):
            if _sample_distance_to_object(p, obj) < margin:
                first = obj
                break
        if first is not None:
            break
    assert first is not None, "instance was supposed to be blocked"

    def refine(a: Point, b: Point, key, rounds=3, k=40):
        lo, hi = 0.0, 1.0
        for _ in range(rounds):
            ts = [lo + (hi - lo) * i / k for i in range(k + 1)]
            best = min(ts, key=lambda t: key(_lerp(a, b, t)))
            span = (hi - lo) / k
            lo, hi = max(0.0, best - span), min(1.0, best + span)
        return _lerp(a, b, (lo + hi) / 2)

    if isinstance(first, Obstacle):
        ref = first.center
    else:
        ref = refine(
            first.p, first.q, lambda q: min(math.hypot(q.x - s.x, q.y - s.y) for s in path)
        )
    return refine(p1, p2, lambda s: math.hypot(s.x - ref.x, s.y - ref.y))


@pytest.mark.parametrize("seed", range(10))
def test_new_point_progress_guarantee(seed):
    """Either the waypoint is reachable on a clear path, or it is strictly
    closer than the blocking point; random blocked instances."""
    rng = random.Random(seed)
    produced = 0
    while produced < 20:
        obstacles = [
            Obstacle(
                f"o{i}",
                Point(rng.uniform(0, 20), rng.uniform(0, 20)),
                rng.uniform(0.3, 2.5),
            )
            for i in range(rng.randint(1, 4))
        ]
        bars = [
            Bar(
                f"b{i}",
                Point(rng.uniform(0, 20), rng.uniform(0, 20)),
                Point(rng.uniform(0, 20), rng.uniform(0, 20)),
                half_width=rng.uniform(0.1, 0.5),
            )
            for i in range(rng.randint(0, 2))
        ]
        w = simple_world(obstacles=obstacles, bars=bars)
        p1 = Point(rng.uniform(0, 20), rng.uniform(0, 20))
        p2 = Point(rng.uniform(0, 20), rng.uniform(0, 20))
        # A robot must be able to stand at p1: outside every inflated region.
        margin = 0.5 + w.params.clearance
        standable = all(
            geo.dist(p1, o.center) > o.radius + margin for o in obstacles
        ) and all(geo.seg_point_distance(b.p, b.q, p1) > b.half_width + margin for b in bars)
        if not standable or geo.dist(p1, p2) < 1.0 or clear_path(w, p1, p2, 0.5):
            continue
        produced += 1
        wp = new_point(w, p1, p2, 0.5)
        blocking_point = _oracle_blocking_point(w, p1, p2, margin)
        assert clear_path(w, p1, wp, 0.5) or geo.dist(p1, wp) < geo.dist(p1, blocking_point), (
            p1,
            p2,
            wp,
        )


# --- predicates -------------------------------------------------------------------


BAR = Bar("A", Point(9, 10), Point(11, 10), half_width=0.25)


def bar_world(robot: Robot) -> World:
    return World(WorldParams(), robots=[robot], bars=[BAR])


def resolve(env: BotworldEnv, name: str, *args):
    env.begin_tick()
    return env.resolve(name, args)


def test_on_midline_facing_bar_pose():
    # On the bisector at distance 4, facing the bar center.
    robot = Robot("r1", Point(10, 6), math.pi / 2)
    env = BotworldEnv(bar_world(robot), "r1")
    midline = resolve(env, "on-bar-midline", ObjectRef("A"))
    facing = resolve(env, "facing-bar", ObjectRef("A"))
    assert isinstance(midline, HystereticReading) and midline.delta == pytest.approx(0.0)
    assert facing.delta == pytest.approx(0.0)
    assert midline.delta < midline.eps_in and facing.delta < facing.eps_in


def test_at_bar_center_band():
    robot = Robot("r1", Point(10, 9.2), math.pi / 2)
    env = BotworldEnv(bar_world(robot), "r1")
    reading = resolve(env, "at-bar-center", ObjectRef("A"))
    assert reading.delta == pytest.approx(0.8)
    assert reading.eps_in == pytest.approx(0.9)
    assert reading.eps_out == pytest.approx(1.1)


def test_facing_midline_zone_geometry():
    # Robot below the bar: the zone is the bisector stretch y in [4, 8].
    robot = Robot("r1", Point(7, 3), 0.0)
    w = bar_world(robot)
    gap_toward = zone_gap(Point(7, 3), math.atan2(2.5, 3.0), w.bars["A"])
    assert gap_toward == 0.0  # ray passes through x=10 between y=4 and 8
    gap_away = zone_gap(Point(7, 3), math.pi, w.bars["A"])
    assert gap_away > math.radians(90)


def test_facing_away_is_false():
    robot = Robot("r1", Point(7, 3), math.pi)
    env = BotworldEnv(bar_world(robot), "r1")
    reading = resolve(env, "facing-midline-zone", ObjectRef("A"))
    assert reading.delta > reading.eps_in


def test_is_grabbing_tracks_holding():
    robot = Robot("r1", Point(10, 9.2), math.pi / 2)
    w = bar_world(robot)
    env = BotworldEnv(w, "r1")
    assert resolve(env, "is-grabbing", ObjectRef("A")) is False
    w.robots["r1"].holding = "A"
    assert resolve(env, "is-grabbing", ObjectRef("A")) is True


def test_sense_exact_without_noise():
    robot = Robot("r1", Point(2.5, -1.5), 0.7)
    env = BotworldEnv(bar_world(robot), "r1")
    env.begin_tick()
    assert env.resolve("position", ()) == Point(2.5, -1.5)
    assert env.resolve("heading", ()).radians == pytest.approx(0.7)


def test_sense_noise_statistics():
    robot = Robot("r1", Point(0, 0), 0.0)
    env = BotworldEnv(bar_world(robot), "r1")
    rng = random.Random(123)
    xs = []
    for _ in range(10000):
        env.begin_tick(rng, sense_sigma=0.1)
        xs.append(env.resolve("position", ()).x)
    mean = sum(xs) / len(xs)
    std = math.sqrt(sum((x - mean) ** 2 for x in xs) / (len(xs) - 1))
    assert abs(std - 0.1) < 0.01  # within 10% of sigma


def test_object_ids_resolve_as_refs():
    robot = Robot("r1", Point(0, 0), 0.0)
    env = BotworldEnv(bar_world(robot), "r1")
    assert resolve(env, "A") == ObjectRef("A")
    assert "A" in env.declared()


# --- serialization ------------------------------------------------------------------


def test_world_json_round_trip():
    w = simple_world(
        bars=[Bar("A", Point(1, 2), Point(3, 4), half_width=0.3)],
        obstacles=[Obstacle("o", Point(5, 5), 2.0)],
    )
    doc = w.to_json()
    w2 = World.from_json(doc)
    assert w2.to_json() == doc


def test_world_rejects_bad_params():
    with pytest.raises(ValueError):
        World.from_json({"params": {"dt": 0}, "robots": []})
    with pytest.raises(ValueError):
        World.from_json({"robots": [{"id": "r", "position": [0, 0], "radius": -1}]})


# --- achievement chain -----------------------------------------------------------


def test_grab_rule_actions_achieve_higher_conditions():
    """From a pose whose first-true rule is i, running the program under
    zero noise makes some rule j < i the selection within a tick budget,
    for every non-goal rule of the fetch program.  Object counts never
    change without add/remove events."""
    import json
    from pathlib import Path

    from teleo.service.runner import ScenarioRunner
    from teleo.service.scenario import scenario_from_dict

    scenarios = Path(__file__).resolve().parent.parent / "scenarios"
    base = json.loads((scenarios / "grab.json").read_text())
    base["program_source"] = (scenarios / "grab.tr").read_text()
    del base["program"]

    # Poses constructed so the first true rule is the one named (bar A
    # spans (9,10)-(11,10); its midline is x = 10, approach zone below).
    poses = {
        5: ((7.0, 3.0), math.pi),  # nothing holds: rotate toward the zone
        4: ((7.0, 3.0), math.atan2(2.5, 3.0)),  # facing the zone: move
        3: ((10.0, 5.0), math.pi),  # on the midline: rotate toward the bar
        2: ((10.0, 5.0), math.pi / 2),  # midline + facing: move in
        1: ((10.0, 9.2), math.pi / 2),  # in reach + facing: grab
    }
    for rule, ((x, y), heading) in poses.items():
        doc = json.loads(json.dumps(base))
        doc["world"]["robots"][0]["position"] = [x, y]
        doc["world"]["robots"][0]["heading"] = heading
        runner = ScenarioRunner(scenario_from_dict(doc))
        objects = len(runner.world.bars) + len(runner.world.obstacles)
        rec = runner.step()
        first = rec["robots"]["r1"]["activation"][0]["selected"]
        assert first == rule, f"pose for rule {rule} selected {first}"
        achieved = None
        for _ in range(2000):
            rec = runner.step()
            sel = rec["robots"]["r1"]["activation"][0]["selected"]
            if sel < rule:
                achieved = sel
                break
        assert achieved is not None, f"rule {rule} never progressed"
        assert len(runner.world.bars) + len(runner.world.obstacles) == objects
