"""Scenario documents: program + entry + world + schedule, as JSON.

A scenario bundles everything one reproducible run needs:

* ``program``: path to a ``.tr`` file (relative to the scenario file), or
  ``program_source`` inline;
* ``entry``: an action-term string like ``"goto(point(10, 10))"``, or a
  map of robot id to entry for multi-robot worlds;
* ``world``: inline world document or a path to one;
* ``ticks``, ``seed``, ``noise`` {exec_p, sense_sigma};
* ``tolerances``: optional {angle|point|scalar: [enter, hold]}, with
  ``angle_deg`` accepted as a convenience;
* ``events``: [{at_tick, ...event fields}].
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from ..botworld import Event, NoiseConfig, World, event_from_json
from ..lang import ParseError, ast, parse, parse_action_term, validate
from ..runtime import RuntimeConfig, Tolerances

log = logging.getLogger("teleo.scenario")


class ScenarioError(Exception):
    """The scenario document (or a file it references) is unusable."""


@dataclass
class Scenario:
    library: ast.Library
    entries: dict[str, ast.ActionTerm]  # robot id -> entry call
    world: World
    ticks: int
    seed: int
    noise: NoiseConfig
    tolerances: Tolerances
    events: list[tuple[int, Event]] = field(default_factory=list)
    program_source: str = ""
    max_depth: int = 64

    def runtime_config(self) -> RuntimeConfig:
        return RuntimeConfig(max_depth=self.max_depth, tolerances=self.tolerances)


def _tolerances_from(doc: dict) -> Tolerances:
    def band(key: str, default):
        if f"{key}_deg" in doc:
            lo, hi = doc[f"{key}_deg"]
            return (math.radians(float(lo)), math.radians(float(hi)))
        if key in doc:
            lo, hi = doc[key]
            return (float(lo), float(hi))
        return default

    base = Tolerances()
    tol = Tolerances(
        angle=band("angle", base.angle),
        point=band("point", base.point),
        scalar=band("scalar", base.scalar),
    )
    for name in ("angle", "point", "scalar"):
        lo, hi = getattr(tol, name)
        if not (0 < lo <= hi):
            raise ScenarioError(f"tolerance {name!r} must satisfy 0 < enter <= hold")
    return tol


def scenario_from_dict(doc: dict, base_dir: Union[str, Path, None] = None) -> Scenario:
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    if "program_source" in doc:
        source = doc["program_source"]
    elif "program" in doc:
        path = base / doc["program"]
        try:
            source = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read program {path}: {exc}") from None
    else:
        raise ScenarioError("scenario needs 'program' or 'program_source'")

    try:
        library = parse(source)
    except ParseError as exc:
        raise ScenarioError(f"program does not parse: {exc}") from None
    diags = validate(library)
    if diags:
        raise ScenarioError("program does not validate: " + "; ".join(map(str, diags)))

    world_doc = doc.get("world")
    if isinstance(world_doc, str):
        try:
            world_doc = json.loads((base / world_doc).read_text())
        except OSError as exc:
            raise ScenarioError(f"cannot read world: {exc}") from None
    if not isinstance(world_doc, dict):
        raise ScenarioError("scenario needs a 'world' document or path")
    try:
        world = World.from_json(world_doc)
    except Exception as exc:
        raise ScenarioError(f"bad world document: {exc}") from None
    if not world.robots:
        raise ScenarioError("world has no robots")

    entry_doc = doc.get("entry")
    if entry_doc is None:
        raise ScenarioError("scenario needs an 'entry'")
    if isinstance(entry_doc, str):
        if len(world.robots) != 1:
            raise ScenarioError("a single entry string needs a single-robot world")
        entry_doc = {next(iter(world.robots)): entry_doc}
    entries: dict[str, ast.ActionTerm] = {}
    for rid, text in entry_doc.items():
        if rid not in world.robots:
            raise ScenarioError(f"entry names unknown robot {rid!r}")
        try:
            action = parse_action_term(text, library)
        except ParseError as exc:
            raise ScenarioError(f"bad entry for {rid!r}: {exc}") from None
        if not isinstance(action, ast.ProgramCallAction):
            raise ScenarioError(f"entry for {rid!r} must call a program or tree")
        entries[rid] = action

    noise_doc = doc.get("noise", {})
    noise = NoiseConfig(
        exec_p=float(noise_doc.get("exec_p", 0.0)),
        sense_sigma=float(noise_doc.get("sense_sigma", 0.0)),
    )
    if not 0.0 <= noise.exec_p <= 1.0:
        raise ScenarioError("noise.exec_p must be within [0, 1]")
    if noise.sense_sigma < 0:
        raise ScenarioError("noise.sense_sigma must be >= 0")

    tolerances = _tolerances_from(doc.get("tolerances", {}))
    # Rotation happens in steps of omega*dt; a narrower enter band than
    # half a step can be jumped over forever.
    step = world.params.omega * world.params.dt
    if tolerances.angle[0] <= step / 2:
        log.warning(
            "angle tolerance enter band %.4f rad is not above omega*dt/2 = %.4f rad; "
            "alignment may hunt or never latch",
            tolerances.angle[0],
            step / 2,
        )

    events: list[tuple[int, Event]] = []
    for ev_doc in doc.get("events", []):
        if "at_tick" not in ev_doc:
            raise ScenarioError("scenario events need 'at_tick'")
        try:
            events.append((int(ev_doc["at_tick"]), event_from_json(ev_doc)))
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"bad event {ev_doc!r}: {exc}") from None

    ticks = int(doc.get("ticks", 1000))
    if ticks <= 0:
        raise ScenarioError("ticks must be positive")

    return Scenario(
        library=library,
        entries=entries,
        world=world,
        ticks=ticks,
        seed=int(doc.get("seed", 0)),
        noise=noise,
        tolerances=tolerances,
        events=sorted(events, key=lambda pair: pair[0]),
        program_source=source,
        max_depth=int(doc.get("max_depth", 64)),
    )


def load_scenario(path: Union[str, Path], seed: Optional[int] = None, ticks: Optional[int] = None) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from None
    if seed is not None:
        doc["seed"] = seed
    if ticks is not None:
        doc["ticks"] = ticks
    return scenario_from_dict(doc, base_dir=path.parent)
