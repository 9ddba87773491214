"""Drives one scenario tick by tick, producing one trace record per tick.

Tick order: sense (noise drawn per robot in id order), one machine tick
per robot (id order), then the world step applies all action increments
and this tick's events.  Events injected live land at the next tick
boundary unless they name a later tick.  Identical scenario + seed gives
a bit-identical record stream.
"""

from __future__ import annotations

import random
from typing import Iterator, Optional

from ..botworld import BotworldEnv, SetEntryArg, UnknownObjectError, event_to_json, world_step
from ..botworld.world import StepLog
from ..lang import format_action, format_expr
from ..runtime import ActivationTrace, EnvError, Machine, TickError, value_to_json
from .scenario import Scenario


class RunError(Exception):
    """A tick failed; the scenario cannot continue."""

    def __init__(self, kind: str, detail: str, tick: int):
        self.kind = kind
        self.detail = detail
        self.tick = tick
        super().__init__(f"{kind} at tick {tick}: {detail}")

    def to_json(self) -> dict:
        return {"error": {"type": self.kind, "detail": self.detail}, "tick": self.tick}


def _activation_to_json(trace: ActivationTrace) -> list[dict]:
    levels = []
    for level in trace.levels:
        doc = {
            "callee": level.callee,
            "instance": level.instance_id,
            "selected": level.selected,
            "truth": "".join("1" if t else "0" for t in level.truth),
        }
        if level.node_ids is not None:
            doc["nodes"] = list(level.node_ids)
        levels.append(doc)
    return levels


def _action_to_json(cmd) -> dict:
    if cmd.is_nil:
        return {"name": "nil", "args": []}
    return {"name": cmd.name, "args": [value_to_json(a) for a in cmd.args]}


class ScenarioRunner:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.world = scenario.world
        self.rng = random.Random(scenario.seed)
        config = scenario.runtime_config()
        self.envs = {
            rid: BotworldEnv(self.world, rid, scenario.tolerances)
            for rid in self.world.robot_order()
        }
        self.machines = {
            rid: Machine(scenario.library, scenario.entries[rid], self.envs[rid], config)
            for rid in self.world.robot_order()
            if rid in scenario.entries
        }
        self._pending: dict[int, list] = {}
        for at_tick, event in scenario.events:
            self._pending.setdefault(at_tick, []).append(event)

    # -- events ---------------------------------------------------------------

    def inject(self, event, at_tick: Optional[int] = None) -> int:
        """Schedule an event; default and minimum is the next tick boundary."""
        due = self.world.tick if at_tick is None else at_tick
        if due < self.world.tick:
            raise ValueError(f"at_tick {due} is in the past (now {self.world.tick})")
        self._pending.setdefault(due, []).append(event)
        return due

    @property
    def finished(self) -> bool:
        return self.world.tick >= self.scenario.ticks

    # -- stepping ---------------------------------------------------------------

    def step(self) -> dict:
        """Advance one tick and return its trace record."""
        t = self.world.tick
        sigma = self.scenario.noise.sense_sigma
        for rid in self.world.robot_order():
            self.envs[rid].begin_tick(self.rng, sigma)
        commands, traces = {}, {}
        for rid in self.world.robot_order():
            machine = self.machines.get(rid)
            if machine is None:
                continue
            try:
                cmd, trace = machine.tick()
            except (TickError, EnvError) as exc:
                raise RunError(type(exc).__name__, f"robot {rid!r}: {exc}", t) from exc
            commands[rid] = cmd
            traces[rid] = trace

        due = self._pending.pop(t, [])
        world_events = [e for e in due if not isinstance(e, SetEntryArg)]
        try:
            log = world_step(
                self.world,
                commands,
                world_events,
                self.rng,
                self.scenario.noise,
                grab_facing_tol=self.scenario.tolerances.angle[1],
            )
        except UnknownObjectError as exc:
            raise RunError("UnknownObject", str(exc), t) from exc
        for event in due:
            if isinstance(event, SetEntryArg):
                rid = event.robot or next(iter(self.machines))
                machine = self.machines.get(rid)
                if machine is None:
                    raise RunError("UnknownRobot", f"set_entry_arg for {rid!r}", t)
                machine.set_entry_arg(event.index, event.value)
                log.applied.append(event)
        return self._record(t, commands, traces, log)

    def _record(self, t: int, commands, traces, log: StepLog) -> dict:
        robots = {}
        for rid in self.world.robot_order():
            robot = self.world.robots[rid]
            doc = {
                "pose": {
                    "position": [robot.position.x, robot.position.y],
                    "heading": robot.heading,
                },
                "holding": robot.holding,
            }
            if rid in commands:
                doc["action"] = _action_to_json(commands[rid])
                doc["activation"] = _activation_to_json(traces[rid])
            robots[rid] = doc
        delta: dict = {}
        if log.changed_bars:
            delta["bars"] = {
                bid: {
                    "p": [self.world.bars[bid].p.x, self.world.bars[bid].p.y],
                    "q": [self.world.bars[bid].q.x, self.world.bars[bid].q.y],
                }
                for bid in sorted(log.changed_bars)
                if bid in self.world.bars
            }
        if log.changed_obstacles:
            delta["obstacles"] = {
                oid: {
                    "center": [
                        self.world.obstacles[oid].center.x,
                        self.world.obstacles[oid].center.y,
                    ]
                }
                for oid in sorted(log.changed_obstacles)
                if oid in self.world.obstacles
            }
        if log.added:
            delta["added"] = sorted(log.added)
        if log.removed:
            delta["removed"] = sorted(log.removed)
        return {
            "tick": t,
            "time": t * self.world.params.dt,
            "robots": robots,
            "world_delta": delta,
            "events_applied": [event_to_json(e) for e in log.applied],
            "notes": log.notes,
        }

    def run(self) -> Iterator[dict]:
        while not self.finished:
            yield self.step()

    # -- extras for the service --------------------------------------------------

    def program_listing(self) -> dict:
        """Rule source text per program/tree, for activation displays."""
        lib = self.scenario.library
        listing: dict = {"programs": {}, "trees": {}}
        for name, prog in lib.programs.items():
            listing["programs"][name] = {
                "params": list(prog.params),
                "rules": [
                    f"{format_expr(r.condition)} -> {format_action(r.action)}"
                    for r in prog.rules
                ],
            }
        for name, tree in lib.trees.items():
            listing["trees"][name] = {
                "params": list(tree.params),
                "nodes": [
                    {
                        "id": n.id,
                        "condition": format_expr(n.condition),
                        "action": None
                        if n.action_to_parent is None
                        else format_action(n.action_to_parent),
                        "parent": n.parent,
                        "cost": n.arc_cost,
                    }
                    for n in tree.nodes
                ],
            }
        return listing
