"""Environment interface: named sensor/model symbols resolved per tick.

A provider must be deterministic within one tick: the same symbol with
the same arguments yields the same value until the next sense phase.
Providers may answer a predicate with a :class:`HystereticReading`; the
evaluator then derives the boolean through per-frame switch state, the
same mechanism explicit proximity tests use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence, Union

from .values import Value


class EnvError(Exception):
    """A symbol failed to resolve."""


@dataclass(frozen=True)
class HystereticReading:
    """Raw proximity measure plus its two thresholds."""

    delta: float
    eps_in: float
    eps_out: float


Resolution = Union[Value, HystereticReading]


class EnvProvider(Protocol):
    def declared(self) -> Mapping[str, int]:
        """Symbol table: name -> arity."""
        ...

    def resolve(self, name: str, args: Sequence[Value]) -> Resolution:
        ...


class ScriptedEnv:
    """Dict-backed provider for tests and simple demos.

    ``values`` maps 0-ary symbol names to values (or 0-ary callables,
    re-read every resolve).  ``functions`` maps names to ``(arity, fn)``.
    """

    def __init__(self, values: dict | None = None, functions: dict | None = None):
        self.values = dict(values or {})
        self.functions = dict(functions or {})

    def declared(self) -> Mapping[str, int]:
        table = {name: 0 for name in self.values}
        table.update({name: arity for name, (arity, _) in self.functions.items()})
        return table

    def set(self, name: str, value) -> None:
        self.values[name] = value

    def resolve(self, name: str, args: Sequence[Value]) -> Resolution:
        if name in self.values and not args:
            v = self.values[name]
            return v() if callable(v) else v
        if name in self.functions:
            arity, fn = self.functions[name]
            if arity != len(args):
                raise EnvError(f"{name!r} takes {arity} argument(s), got {len(args)}")
            return fn(*args)
        raise EnvError(f"cannot resolve {name!r}/{len(args)}")
