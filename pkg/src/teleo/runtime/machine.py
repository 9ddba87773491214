"""Tick execution with activation-frame retention and garbage collection.

Every tick walks the frame chain from the entry downward.  At each frame
all rule (or node) conditions are evaluated, in order, under bindings
re-evaluated in the calling frame; the first true rule (or the cheapest
true node) is selected.  An unchanged selection retains the existing
child frame together with its switch state; a changed selection discards
the whole child subtree and, if the new action is a call, constructs a
fresh frame.  The walk ends at a ``nil`` or primitive action, which is
emitted as this tick's action increment.

A tick is atomic: the walk runs on a clone of the chain and commits only
on success, so any error leaves the machine exactly as it was.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from ..lang import ast
from .env import EnvError, EnvProvider, HystereticReading
from .values import Point, Value, ValueKindError, delta_between, value_kind

DEFAULT_MAX_DEPTH = 64


@dataclass(frozen=True)
class Tolerances:
    """Default proximity bands for ``equal``, keyed by value kind."""

    angle: tuple[float, float] = (math.radians(2.0), math.radians(4.0))
    point: tuple[float, float] = (0.10, 0.20)
    scalar: tuple[float, float] = (1e-3, 2e-3)

    def for_kind(self, kind: str) -> tuple[float, float]:
        if kind == "angle":
            return self.angle
        if kind == "point":
            return self.point
        if kind == "scalar":
            return self.scalar
        raise ValueKindError(f"{kind} values have no default tolerance")


@dataclass(frozen=True)
class RuntimeConfig:
    max_depth: int = DEFAULT_MAX_DEPTH
    tolerances: Tolerances = field(default_factory=Tolerances)


@dataclass(frozen=True)
class ActionCommand:
    """The energized action increment: ``name`` None means nil."""

    name: Optional[str]
    args: tuple[Value, ...] = ()

    @property
    def is_nil(self) -> bool:
        return self.name is None


@dataclass(frozen=True)
class LevelRecord:
    callee: str
    instance_id: int
    selected: Union[int, str]
    truth: tuple[bool, ...]
    node_ids: Optional[tuple[str, ...]] = None  # set for trees only


@dataclass(frozen=True)
class ActivationTrace:
    levels: tuple[LevelRecord, ...]
    action: ActionCommand

    @property
    def depth(self) -> int:
        return len(self.levels)


class TickError(Exception):
    pass


class NoApplicableRule(TickError):
    def __init__(self, callee: str, depth: int):
        self.callee = callee
        self.depth = depth
        super().__init__(f"no condition true in {callee!r} at depth {depth}")


class RecursionLimitError(TickError):
    def __init__(self, depth: int):
        self.depth = depth
        super().__init__(f"activation depth would exceed the limit at {depth}")


class UnknownEntryError(Exception):
    pass


class EntryArityError(Exception):
    pass


class NotStartedError(Exception):
    pass


@dataclass(frozen=True)
class Lit:
    """Runtime-internal constant expression (event-injected bindings)."""

    value: Value


class Frame:
    """One activation: bindings, selection memory, switch state.

    ``callee`` is None for the synthetic entry scope that anchors the
    chain; its only job is to give entry argument expressions a place to
    evaluate and to hold their switch state.
    """

    __slots__ = ("instance_id", "callee", "arg_exprs", "parent", "selected", "child", "hysteresis")

    def __init__(self, instance_id, callee, arg_exprs, parent):
        self.instance_id = instance_id
        self.callee = callee
        self.arg_exprs = tuple(arg_exprs)
        self.parent = parent
        self.selected: Union[int, str, None] = None
        self.child: Optional[Frame] = None
        self.hysteresis: dict[int, bool] = {}

    def clone_chain(self, parent: Optional["Frame"] = None) -> "Frame":
        new = Frame(self.instance_id, self.callee, self.arg_exprs, parent)
        new.selected = self.selected
        new.hysteresis = dict(self.hysteresis)
        if self.child is not None:
            new.child = self.child.clone_chain(new)
        return new


def select_tree_node(tree: ast.Tree, truth: Mapping[str, bool]) -> Optional[str]:
    """Cheapest true node by summed arc cost to the root; ties go to the
    earliest declaration.  None when no node is true."""
    best: Optional[tuple[float, str]] = None
    for node in tree.nodes:  # declaration order makes strict < break ties
        if not truth[node.id]:
            continue
        cost = tree.cost_to_root(node.id)
        if best is None or cost < best[0]:
            best = (cost, node.id)
    return None if best is None else best[1]


class Machine:
    """Executes one entry call against one environment provider."""

    def __init__(
        self,
        library: ast.Library,
        entry: ast.ActionTerm,
        env: EnvProvider,
        config: Optional[RuntimeConfig] = None,
    ):
        if not isinstance(entry, ast.ProgramCallAction):
            raise UnknownEntryError(f"entry must call a program or tree, got {entry!r}")
        decl = library.lookup_callable(entry.name)
        if decl is None:
            raise UnknownEntryError(f"unknown entry {entry.name!r}")
        if len(decl.params) != len(entry.args):
            raise EntryArityError(
                f"{entry.name!r} takes {len(decl.params)} argument(s), got {len(entry.args)}"
            )
        self._library = library
        self._env = env
        self._config = config or RuntimeConfig()
        self._next_instance = 0
        self._entry = Frame(self._fresh_id(), None, (), None)
        self._entry.selected = 0  # fixed: the entry call is never re-chosen
        self._entry.child = Frame(self._fresh_id(), entry.name, entry.args, self._entry)
        self._tick_count = 0
        self._last_trace: Optional[ActivationTrace] = None
        self._param_index: dict[str, dict[str, int]] = {}

    # -- public surface ---------------------------------------------------

    @property
    def library(self) -> ast.Library:
        return self._library

    @property
    def tick_count(self) -> int:
        return self._tick_count

    @property
    def max_depth(self) -> int:
        return self._config.max_depth

    def trace(self) -> ActivationTrace:
        if self._last_trace is None:
            raise NotStartedError("no tick has run yet")
        return self._last_trace

    def set_entry_arg(self, index: int, value: Value) -> None:
        root = self._entry.child
        if not 0 <= index < len(root.arg_exprs):
            raise IndexError(f"entry has {len(root.arg_exprs)} argument(s)")
        args = list(root.arg_exprs)
        args[index] = Lit(value)
        root.arg_exprs = tuple(args)

    def tick(self) -> tuple[ActionCommand, ActivationTrace]:
        new_entry = self._entry.clone_chain()
        records: list[LevelRecord] = []
        frame = new_entry.child
        depth = 1
        cmd: Optional[ActionCommand] = None
        while True:
            decl = self._library.lookup_callable(frame.callee)
            if isinstance(decl, ast.Program):
                truths = tuple(self._eval_bool(r.condition, frame) for r in decl.rules)
                sel: Union[int, str, None] = next((i for i, t in enumerate(truths) if t), None)
                node_ids = None
                action = decl.rules[sel].action if sel is not None else None
            else:
                node_ids = tuple(n.id for n in decl.nodes)
                tmap = {n.id: self._eval_bool(n.condition, frame) for n in decl.nodes}
                truths = tuple(tmap[i] for i in node_ids)
                sel = select_tree_node(decl, tmap)
                if sel is None:
                    action = None
                else:
                    node = decl.node(sel)
                    action = ast.NilAction() if node.parent is None else node.action_to_parent
            if sel is None:
                raise NoApplicableRule(frame.callee, depth)
            if frame.selected != sel:
                frame.child = None
            frame.selected = sel
            records.append(LevelRecord(frame.callee, frame.instance_id, sel, truths, node_ids))
            if isinstance(action, ast.NilAction):
                cmd = ActionCommand(None)
                break
            if isinstance(action, ast.PrimitiveAction):
                args = tuple(self._eval(a, frame) for a in action.args)
                cmd = ActionCommand(action.name, args)
                break
            if depth + 1 > self._config.max_depth:
                raise RecursionLimitError(depth + 1)
            if frame.child is None:
                frame.child = Frame(self._fresh_id(), action.name, action.args, frame)
            frame = frame.child
            depth += 1
        trace = ActivationTrace(tuple(records), cmd)
        self._entry = new_entry
        self._tick_count += 1
        self._last_trace = trace
        return cmd, trace

    # -- evaluation ---------------------------------------------------------

    def _fresh_id(self) -> int:
        self._next_instance += 1
        return self._next_instance

    def _params_of(self, callee: str) -> dict[str, int]:
        table = self._param_index.get(callee)
        if table is None:
            table = {p: i for i, p in enumerate(self._library.params_of(callee))}
            self._param_index[callee] = table
        return table

    def _eval_bool(self, e: ast.Expr, frame: Frame) -> bool:
        v = self._eval(e, frame)
        if not isinstance(v, bool):
            raise ValueKindError(f"condition evaluated to {value_kind(v)}, expected bool")
        return v

    def _schmitt(self, frame: Frame, site: int, delta: float, eps_in: float, eps_out: float) -> bool:
        prev = frame.hysteresis.get(site)
        truth = delta <= eps_out if prev is True else delta < eps_in
        frame.hysteresis[site] = truth
        return truth

    def _eval(self, e: ast.Expr, frame: Frame) -> Value:
        if isinstance(e, ast.TrueExpr):
            return True
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, ast.Number):
            return e.value
        if isinstance(e, ast.AngleLit):
            from .values import Angle

            return Angle(e.radians)
        if isinstance(e, ast.PointLit):
            return Point(e.x, e.y)
        if isinstance(e, ast.Var):
            if frame.callee is not None:
                idx = self._params_of(frame.callee).get(e.name)
                if idx is not None:
                    # Caller-scope binding, re-evaluated every tick.
                    return self._eval(frame.arg_exprs[idx], frame.parent)
            return self._resolve(e.name, (), e, frame)
        if isinstance(e, ast.Call):
            args = tuple(self._eval(a, frame) for a in e.args)
            if e.name == "point":
                if len(args) == 2 and all(value_kind(a) == "scalar" for a in args):
                    return Point(float(args[0]), float(args[1]))
                raise ValueKindError("point(x, y) takes two scalars")
            return self._resolve(e.name, args, e, frame)
        if isinstance(e, ast.Not):
            return not self._eval_bool(e.operand, frame)
        if isinstance(e, ast.And):
            # Strict: every operand is computed every tick, so switch
            # state inside unselected branches keeps tracking the world.
            results = [self._eval_bool(op, frame) for op in e.operands]
            return all(results)
        if isinstance(e, ast.Or):
            results = [self._eval_bool(op, frame) for op in e.operands]
            return any(results)
        if isinstance(e, ast.Near):
            va = self._eval(e.a, frame)
            vb = self._eval(e.b, frame)
            delta, kind = delta_between(va, vb)
            if e.eps_in is None:
                eps_in, eps_out = self._config.tolerances.for_kind(kind)
            else:
                eps_in, eps_out = e.eps_in, e.eps_out
            return self._schmitt(frame, e.site, delta, eps_in, eps_out)
        raise TypeError(f"not an expression: {e!r}")

    def _resolve(self, name: str, args: tuple[Value, ...], e: ast.Expr, frame: Frame) -> Value:
        declared = self._env.declared()
        if name not in declared:
            raise EnvError(f"cannot resolve {name!r}")
        if declared[name] != len(args):
            raise EnvError(f"{name!r} takes {declared[name]} argument(s), got {len(args)}")
        result = self._env.resolve(name, args)
        if isinstance(result, HystereticReading):
            site = getattr(e, "site", -1)
            return self._schmitt(frame, site, result.delta, result.eps_in, result.eps_out)
        return result
