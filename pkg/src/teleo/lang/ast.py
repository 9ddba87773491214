"""Syntax tree for teleo-reactive rule programs and selection trees.

A program is an ordered list of condition -> action rules; a tree attaches
a condition to every node and an action to every arc toward the parent.
Rule and node order is significant everywhere: it is the priority order
used by the selection machinery and the fixed tie-breaking order for
trees.  Conditions are boolean expressions over environment symbols and
call parameters; actions are the idle action ``nil``, a primitive actuator
command, or a call into another program or tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union


def wrap_angle(radians: float) -> float:
    """Normalize an angle to the half-open interval (-pi, pi]."""
    r = math.remainder(radians, math.tau)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class Span:
    """Source range, 1-based lines and columns, end exclusive."""

    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


# --- expressions --------------------------------------------------------


@dataclass(frozen=True)
class TrueExpr:
    """The always-true condition, spelled ``T`` (or ``true``) in source."""


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class AngleLit:
    """Angle literal; stored in radians, normalized to (-pi, pi]."""

    radians: float


@dataclass(frozen=True)
class PointLit:
    x: float
    y: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    # Unique per syntactic site; keys per-frame switch state for
    # predicates that resolve hysteretically.  Not part of equality.
    site: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class And:
    operands: tuple["Expr", ...]  # always >= 2


@dataclass(frozen=True)
class Or:
    operands: tuple["Expr", ...]  # always >= 2


@dataclass(frozen=True)
class Near:
    """Two-threshold proximity test between two values of the same kind.

    Truth enters when the distance falls below ``eps_in`` and persists
    until it exceeds ``eps_out`` (a Schmitt trigger).  ``None`` thresholds
    defer to the runtime tolerance table, selected by the kind of the
    compared values; this is the desugaring of ``equal(a, b)`` and
    ``a == b``.
    """

    a: "Expr"
    b: "Expr"
    eps_in: Optional[float]
    eps_out: Optional[float]
    site: int = field(default=-1, compare=False, repr=False)


Expr = Union[TrueExpr, Number, AngleLit, PointLit, Var, Call, Not, And, Or, Near]


# --- actions ------------------------------------------------------------


@dataclass(frozen=True)
class NilAction:
    """Do nothing; the action of a satisfied goal rule."""


@dataclass(frozen=True)
class PrimitiveAction:
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class ProgramCallAction:
    name: str
    args: tuple[Expr, ...] = ()


ActionTerm = Union[NilAction, PrimitiveAction, ProgramCallAction]


# --- declarations -------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    condition: Expr
    action: ActionTerm
    span: Optional[Span] = field(default=None, compare=False)


@dataclass
class Program:
    name: str
    params: tuple[str, ...]
    rules: tuple[Rule, ...]
    span: Optional[Span] = field(default=None, compare=False)


@dataclass
class TreeNode:
    id: str
    condition: Expr
    parent: Optional[str]  # None only for the root
    action_to_parent: Optional[ActionTerm]  # None only for the root
    arc_cost: float = 1.0
    decl_index: int = 0


@dataclass
class Tree:
    name: str
    params: tuple[str, ...]
    nodes: tuple[TreeNode, ...]  # declaration order; nodes[0] is the root
    span: Optional[Span] = field(default=None, compare=False)

    def node(self, node_id: str) -> TreeNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def cost_to_root(self, node_id: str) -> float:
        """Sum of arc costs along the path to the root (root itself: 0)."""
        cost = 0.0
        n = self.node(node_id)
        while n.parent is not None:
            cost += n.arc_cost
            n = self.node(n.parent)
        return cost


@dataclass
class Library:
    """All top-level declarations of one source unit."""

    programs: dict[str, Program] = field(default_factory=dict)
    trees: dict[str, Tree] = field(default_factory=dict)
    primitives: dict[str, int] = field(default_factory=dict)  # name -> arity
    env_symbols: dict[str, int] = field(default_factory=dict)  # name -> arity
    # Number of hysteresis sites handed out so far; extended when entry
    # action terms are parsed against this library.
    site_count: int = field(default=0, compare=False)

    def lookup_callable(self, name: str) -> Union[Program, Tree, None]:
        return self.programs.get(name) or self.trees.get(name)

    def params_of(self, name: str) -> tuple[str, ...]:
        decl = self.lookup_callable(name)
        if decl is None:
            raise KeyError(name)
        return decl.params
