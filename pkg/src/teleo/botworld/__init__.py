"""Fixed-timestep 2-D world: robots, bars, obstacles, events, sensing."""

from . import geometry
from .events import (
    AddObstacle,
    Event,
    ForceRelease,
    MoveObject,
    RemoveObject,
    SetEntryArg,
    TeleportRobot,
    UnknownObjectError,
    event_from_json,
    event_to_json,
)
from .geometry import DegenerateCourseError, course
from .sense import BotworldEnv, NoBlockerError, clear_path, new_point, zone_gap
from .world import (
    Bar,
    NoiseConfig,
    Obstacle,
    Robot,
    StepLog,
    UnknownRobotError,
    World,
    WorldParams,
    world_step,
)

__all__ = [
    "AddObstacle",
    "Bar",
    "BotworldEnv",
    "DegenerateCourseError",
    "Event",
    "ForceRelease",
    "MoveObject",
    "NoBlockerError",
    "NoiseConfig",
    "Obstacle",
    "RemoveObject",
    "Robot",
    "SetEntryArg",
    "StepLog",
    "TeleportRobot",
    "UnknownObjectError",
    "UnknownRobotError",
    "World",
    "WorldParams",
    "clear_path",
    "course",
    "event_from_json",
    "event_to_json",
    "geometry",
    "new_point",
    "world_step",
    "zone_gap",
]
