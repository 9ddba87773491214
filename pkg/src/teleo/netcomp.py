"""Compile a propositional rule sequence into a three-layer threshold
network, and verify exact behavioral equivalence with direct rule
scanning.

Layer 1 tests each rule's conjunction (one unit per rule): weight +1 per
positive literal, -1 per negative literal, threshold = number of positive
literals, so an empty conjunction always fires.  Layer 2 finds the first
firing condition: unit i receives +1 from layer-1 unit i and -1 from
every earlier unit, threshold 1, so at most one layer-2 unit fires.
Layer 3 has one OR "associator" per distinct action with unit weights
from exactly the layer-2 units whose rule selects that action.  A unit
fires when its weighted input sum reaches its threshold (>=).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .analysis import PropRule

MAX_EXHAUSTIVE_FEATURES = 16


class NetError(Exception):
    pass


class DimensionMismatchError(NetError):
    pass


class TooLargeError(NetError):
    pass


@dataclass(frozen=True)
class ThresholdUnit:
    weights: tuple[float, ...]
    threshold: float

    def fires(self, inputs: Sequence[float]) -> bool:
        return sum(w * x for w, x in zip(self.weights, inputs)) >= self.threshold


@dataclass(frozen=True)
class ThresholdNet:
    feature_names: tuple[str, ...]
    layer1: tuple[ThresholdUnit, ...]  # one unit per rule condition
    layer2: tuple[ThresholdUnit, ...]  # first-true selection, one per rule
    layer3: tuple[ThresholdUnit, ...]  # one associator per distinct action
    action_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.feature_names)

    @property
    def m(self) -> int:
        return len(self.layer1)

    @property
    def k(self) -> int:
        return len(self.layer3)

    def to_json(self) -> dict:
        def units(layer):
            return [{"weights": list(u.weights), "threshold": u.threshold} for u in layer]

        return {
            "n": self.n,
            "feature_names": list(self.feature_names),
            "action_names": list(self.action_names),
            "layer1": units(self.layer1),
            "layer2": units(self.layer2),
            "layer3": units(self.layer3),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ThresholdNet":
        def units(rows):
            return tuple(ThresholdUnit(tuple(r["weights"]), r["threshold"]) for r in rows)

        return cls(
            tuple(doc["feature_names"]),
            units(doc["layer1"]),
            units(doc["layer2"]),
            units(doc["layer3"]),
            tuple(doc["action_names"]),
        )


def _action_name(rule: PropRule) -> str:
    return rule.action if rule.action is not None else "nil"


def compile_rules(rules: Sequence[PropRule], features: Sequence[str]) -> ThresholdNet:
    """Build the network for a sequence of conjunctive rules."""
    features = tuple(features)
    index = {f: i for i, f in enumerate(features)}
    m = len(rules)

    layer1 = []
    for rule in rules:
        cond = rule.condition
        extra = cond.features() - set(features)
        if extra:
            raise NetError(f"undeclared feature(s): {sorted(extra)}")
        weights = [0.0] * len(features)
        for f in cond.pos:
            weights[index[f]] = 1.0
        for f in cond.neg:
            weights[index[f]] = -1.0
        layer1.append(ThresholdUnit(tuple(weights), float(len(cond.pos))))

    layer2 = []
    for i in range(m):
        weights = [0.0] * m
        weights[i] = 1.0
        for j in range(i):
            weights[j] = -1.0
        layer2.append(ThresholdUnit(tuple(weights), 1.0))

    action_names: list[str] = []
    for rule in rules:
        name = _action_name(rule)
        if name not in action_names:
            action_names.append(name)
    layer3 = []
    for name in action_names:
        weights = [1.0 if _action_name(r) == name else 0.0 for r in rules]
        layer3.append(ThresholdUnit(tuple(weights), 1.0))

    return ThresholdNet(features, tuple(layer1), tuple(layer2), tuple(layer3), tuple(action_names))


def _layer_outputs(layer, inputs) -> list[int]:
    return [1 if u.fires(inputs) else 0 for u in layer]


def forward(net: ThresholdNet, x: Sequence[int]) -> Optional[int]:
    """Evaluate the net on a 0/1 input; the index of the unique firing
    associator's action, or None when nothing fires."""
    if len(x) != net.n:
        raise DimensionMismatchError(f"input has {len(x)} components, net expects {net.n}")
    out1 = _layer_outputs(net.layer1, x)
    out2 = _layer_outputs(net.layer2, out1)
    fired = [i for i, u in enumerate(net.layer3) if u.fires(out2)]
    if not fired:
        return None
    if len(fired) > 1:
        raise NetError(f"multiple associators fired: {fired}")
    return fired[0]


def layer2_firing_count(net: ThresholdNet, x: Sequence[int]) -> int:
    out1 = _layer_outputs(net.layer1, x)
    return sum(_layer_outputs(net.layer2, out1))


def scan_rules(rules: Sequence[PropRule], features: Sequence[str], x: Sequence[int]) -> Optional[str]:
    """Direct interpretation: the first rule whose conjunction holds."""
    state = frozenset(f for f, b in zip(features, x) if b)
    for rule in rules:
        if rule.condition.satisfied_by(state):
            return _action_name(rule)
    return None


def verify_equivalence(
    net: ThresholdNet, rules: Sequence[PropRule], features: Sequence[str]
) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Exhaustively compare the net with direct scanning; the first
    disagreeing input is the counterexample."""
    if len(features) > MAX_EXHAUSTIVE_FEATURES:
        raise TooLargeError(
            f"{len(features)} features exceeds the exhaustive limit {MAX_EXHAUSTIVE_FEATURES}"
        )
    for x in itertools.product((0, 1), repeat=len(features)):
        want = scan_rules(rules, features, x)
        got = forward(net, x)
        got_name = None if got is None else net.action_names[got]
        if want != got_name:
            return False, x
    return True, None


def save_net(net: ThresholdNet, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(net.to_json(), indent=2) + "\n")


def load_net(path: Union[str, Path]) -> ThresholdNet:
    return ThresholdNet.from_json(json.loads(Path(path).read_text()))
