"""Static verification of propositional rule sequences and trees.

Conditions are conjunctions of literals over a declared feature set.
Actions carry declarative models (precondition / add list / delete list)
describing the endpoint effect of one normally-completed execution.
Three checks are offered:

* goal-regression structure: every non-first rule's condition must entail
  the regression of some earlier condition through the rule's action;
* coverage: the disjunction of all conditions is a tautology, decided
  exhaustively over the feature assignments (n <= 20);
* both together ("universal"): such a sequence keeps making progress
  toward its first condition as long as actions mostly have their
  modeled effects.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, Iterable, Mapping, Optional, Sequence, Union

MAX_FEATURES = 20


class AnalysisError(Exception):
    pass


class UnknownFeatureError(AnalysisError):
    pass


class MissingModelError(AnalysisError):
    def __init__(self, action: str):
        self.action = action
        super().__init__(f"no model for action {action!r}")


class TooManyFeaturesError(AnalysisError):
    pass


class NonPropositionalError(AnalysisError):
    """A condition is not a conjunction of literals over 0-ary symbols."""


@dataclass(frozen=True)
class PropCondition:
    """Conjunction of literals; the empty conjunction is TRUE."""

    pos: frozenset[str] = frozenset()
    neg: frozenset[str] = frozenset()

    @classmethod
    def parse(cls, literals: Iterable[str]) -> "PropCondition":
        """Build from strings, ``!name`` (or ``not name``) negating."""
        pos, neg = set(), set()
        for lit in literals:
            lit = lit.strip()
            if lit.startswith("!"):
                neg.add(lit[1:].strip())
            elif lit.startswith("not "):
                neg.add(lit[4:].strip())
            else:
                pos.add(lit)
        return cls(frozenset(pos), frozenset(neg))

    def features(self) -> frozenset[str]:
        return self.pos | self.neg

    def is_true(self) -> bool:
        return not self.pos and not self.neg

    def contradictory(self) -> bool:
        return bool(self.pos & self.neg)

    def entails(self, other: "PropCondition") -> bool:
        """self => other, i.e. other's literals are a subset of self's."""
        return other.pos <= self.pos and other.neg <= self.neg

    def satisfied_by(self, state: AbstractSet[str]) -> bool:
        return self.pos <= state and not (self.neg & state)

    def literals(self) -> list[str]:
        return sorted(self.pos) + [f"!{f}" for f in sorted(self.neg)]


TRUE = PropCondition()


@dataclass(frozen=True)
class ActionModel:
    """Endpoint effect of one normally-completed execution."""

    name: str
    precond: PropCondition = TRUE
    add: frozenset[str] = frozenset()
    delete: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.add & self.delete:
            raise AnalysisError(f"model {self.name!r} adds and deletes {self.add & self.delete}")

    def apply(self, state: frozenset[str]) -> frozenset[str]:
        return (state - self.delete) | self.add


IDENTITY_MODEL = ActionModel("nil")


@dataclass(frozen=True)
class PropRule:
    condition: PropCondition
    action: Optional[str]  # None = the idle action
    model: Optional[ActionModel] = None  # occurrence-specific override


@dataclass(frozen=True)
class RuleVerdict:
    index: int  # 1-based position in the sequence / declaration order
    regresses_from: Optional[int]  # smallest earlier index, or None
    detail: str = ""


@dataclass(frozen=True)
class AnalysisReport:
    verdicts: tuple[RuleVerdict, ...]
    complete: bool
    counterexample: Optional[dict[str, bool]]

    @property
    def universal(self) -> bool:
        return self.complete and all(
            v.regresses_from is not None for v in self.verdicts if v.index > 1
        )

    def to_json(self) -> dict:
        return {
            "universal": self.universal,
            "complete": self.complete,
            "counterexample": self.counterexample,
            "rules": [
                {"rule": v.index, "regresses_from": v.regresses_from, "detail": v.detail}
                for v in self.verdicts
            ],
        }


def regress(goal: PropCondition, action: ActionModel) -> Optional[PropCondition]:
    """Weakest conjunction guaranteeing ``goal`` after ``action``; None is bottom.

    Bottom when the action deletes a positively-required feature, adds a
    feature required false, or the combined conjunction contradicts
    itself.  Otherwise the precondition joined with the goal literals the
    effect lists do not already guarantee.
    """
    if goal.pos & action.delete or goal.neg & action.add:
        return None
    pos = action.precond.pos | (goal.pos - action.add)
    neg = action.precond.neg | (goal.neg - action.delete)
    if pos & neg:
        return None
    return PropCondition(frozenset(pos), frozenset(neg))


def _check_features(conds: Iterable[PropCondition], features: Sequence[str]) -> None:
    fset = set(features)
    for c in conds:
        extra = c.features() - fset
        if extra:
            raise UnknownFeatureError(f"undeclared feature(s): {sorted(extra)}")


def _model_for(rule: PropRule, models: Mapping[str, ActionModel]) -> ActionModel:
    if rule.model is not None:
        return rule.model
    if rule.action is None:
        return IDENTITY_MODEL
    model = models.get(rule.action)
    if model is None:
        raise MissingModelError(rule.action)
    return model


def check_regression_property(
    rules: Sequence[PropRule],
    models: Mapping[str, ActionModel],
    features: Sequence[str],
) -> tuple[RuleVerdict, ...]:
    """Per-rule verdict: the smallest j < i whose condition's regression
    through rule i's action is entailed by rule i's condition."""
    _check_features([r.condition for r in rules], features)
    _check_features(
        [m.precond for m in models.values()]
        + [r.model.precond for r in rules if r.model is not None],
        features,
    )
    verdicts: list[RuleVerdict] = []
    for i, rule in enumerate(rules, start=1):
        if i == 1:
            verdicts.append(RuleVerdict(1, None, "goal rule"))
            continue
        model = _model_for(rule, models)
        found = None
        for j in range(1, i):
            target = rules[j - 1].condition
            reg = regress(target, model)
            if reg is not None and rule.condition.entails(reg):
                found = j
                break
        detail = (
            f"regression of rule {found}" if found is not None else "no earlier rule regresses"
        )
        verdicts.append(RuleVerdict(i, found, detail))
    return tuple(verdicts)


def check_completeness(
    conditions: Sequence[PropCondition], features: Sequence[str]
) -> tuple[bool, Optional[dict[str, bool]]]:
    """Is the disjunction of the conditions a tautology?  Exhaustive over
    all feature assignments; returns a falsifying assignment on failure."""
    if len(features) > MAX_FEATURES:
        raise TooManyFeaturesError(f"{len(features)} features exceeds the limit {MAX_FEATURES}")
    _check_features(conditions, features)
    for bits in itertools.product((False, True), repeat=len(features)):
        state = frozenset(f for f, b in zip(features, bits) if b)
        if not any(c.satisfied_by(state) for c in conditions):
            return False, dict(zip(features, bits))
    return True, None


def check_universal(
    rules: Sequence[PropRule],
    models: Mapping[str, ActionModel],
    features: Sequence[str],
) -> AnalysisReport:
    verdicts = check_regression_property(rules, models, features)
    complete, counterexample = check_completeness([r.condition for r in rules], features)
    return AnalysisReport(verdicts, complete, counterexample)


# --- trees ---------------------------------------------------------------


@dataclass(frozen=True)
class PropTreeNode:
    id: str
    condition: PropCondition
    parent: Optional[str]  # None for the root
    action: Optional[str] = None  # None only for the root
    model: Optional[ActionModel] = None


def check_tree(
    nodes: Sequence[PropTreeNode],
    models: Mapping[str, ActionModel],
    features: Sequence[str],
) -> AnalysisReport:
    """Tree variant: each non-root node is checked against its own parent
    (the target condition is fixed, unlike sequences)."""
    _check_features([n.condition for n in nodes], features)
    by_id = {n.id: n for n in nodes}
    index = {n.id: i for i, n in enumerate(nodes, start=1)}
    verdicts: list[RuleVerdict] = []
    for i, node in enumerate(nodes, start=1):
        if node.parent is None:
            verdicts.append(RuleVerdict(i, None, "root (goal)"))
            continue
        model = _model_for(PropRule(node.condition, node.action, node.model), models)
        reg = regress(by_id[node.parent].condition, model)
        if reg is not None and node.condition.entails(reg):
            verdicts.append(RuleVerdict(i, index[node.parent], f"regression of {node.parent!r}"))
        else:
            verdicts.append(RuleVerdict(i, None, f"does not regress parent {node.parent!r}"))
    complete, counterexample = check_completeness([n.condition for n in nodes], features)
    return AnalysisReport(tuple(verdicts), complete, counterexample)


# --- adapters from the surface language -----------------------------------


def prop_condition_from_expr(expr) -> PropCondition:
    """Lower a language condition to a literal conjunction, or raise."""
    from .lang import ast

    pos, neg = set(), set()

    def literal_name(e) -> str:
        if isinstance(e, ast.Var):
            return e.name
        if isinstance(e, ast.Call) and not e.args:
            return e.name
        raise NonPropositionalError(f"not a propositional literal: {e!r}")

    def walk(e, negated: bool):
        if isinstance(e, ast.TrueExpr):
            if negated:
                raise NonPropositionalError("negated truth constant")
            return
        if isinstance(e, ast.Not):
            walk(e.operand, not negated)
            return
        if isinstance(e, ast.And):
            if negated:
                raise NonPropositionalError("negated conjunction")
            for op in e.operands:
                walk(op, False)
            return
        (neg if negated else pos).add(literal_name(e))

    walk(expr, False)
    cond = PropCondition(frozenset(pos), frozenset(neg))
    if cond.contradictory():
        raise NonPropositionalError(f"contradictory condition: {cond.literals()}")
    return cond


def prop_rules_from_program(program, rule_models: Mapping[int, ActionModel] | None = None):
    """Lower a parsed program to PropRules; actions become their names."""
    from .lang import ast

    rule_models = rule_models or {}
    rules = []
    for i, rule in enumerate(program.rules, start=1):
        cond = prop_condition_from_expr(rule.condition)
        if isinstance(rule.action, ast.NilAction):
            action = None
        else:
            if rule.action.args:
                raise NonPropositionalError(f"action {rule.action.name!r} takes arguments")
            action = rule.action.name
        rules.append(PropRule(cond, action, rule_models.get(i)))
    return rules


def prop_nodes_from_tree(tree) -> list[PropTreeNode]:
    from .lang import ast

    nodes = []
    for node in tree.nodes:
        cond = prop_condition_from_expr(node.condition)
        if node.action_to_parent is None:
            action = None
        elif isinstance(node.action_to_parent, ast.NilAction):
            action = None
        else:
            if node.action_to_parent.args:
                raise NonPropositionalError("tree arc action takes arguments")
            action = node.action_to_parent.name
        nodes.append(PropTreeNode(node.id, cond, node.parent, action))
    return nodes


# --- model documents -------------------------------------------------------


@dataclass
class ModelDocument:
    """Parsed action-model file: features, per-name models, and optional
    per-program, per-rule (1-based) overrides."""

    features: list[str]
    actions: dict[str, ActionModel]
    rule_overrides: dict[str, dict[int, ActionModel]] = field(default_factory=dict)

    def overrides_for(self, program_name: str) -> dict[int, ActionModel]:
        return self.rule_overrides.get(program_name, {})


def _model_from_doc(name: str, doc: dict) -> ActionModel:
    return ActionModel(
        name,
        precond=PropCondition.parse(doc.get("pre", [])),
        add=frozenset(doc.get("add", [])),
        delete=frozenset(doc.get("del", [])),
    )


def load_models(source: Union[str, Path, dict]) -> ModelDocument:
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text())
    else:
        doc = source
    features = list(doc.get("features", []))
    actions = {name: _model_from_doc(name, body) for name, body in doc.get("actions", {}).items()}
    overrides: dict[str, dict[int, ActionModel]] = {}
    for prog, body in doc.get("programs", {}).items():
        overrides[prog] = {
            int(idx): _model_from_doc(f"{prog}#{idx}", model)
            for idx, model in body.get("rules", {}).items()
        }
    return ModelDocument(features, actions, overrides)
