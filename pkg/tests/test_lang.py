"""Parser, formatter and validator tests, including round-trip identity
over a generated corpus."""

import math
import random

import pytest

from teleo.lang import (
    And,
    AngleLit,
    Library,
    Near,
    NilAction,
    Not,
    Number,
    Or,
    ParseError,
    PointLit,
    PrimitiveAction,
    ProgramCallAction,
    TrueExpr,
    Var,
    parse,
    parse_action_term,
    pretty,
    validate,
)

GOTO_SRC = """
primitive move, rotate;
env position, heading, course(2);

prog goto(loc) {
  equal(position, loc) -> nil;
  equal(heading, course(position, loc)) -> move;
  T -> rotate;
}
"""

AMBLE_SRC = """
primitive move, rotate;
env position, heading, course(2), clear-path(2), new-point(2);

prog goto(loc) {
  equal(position, loc) -> nil;
  equal(heading, course(position, loc)) -> move;
  T -> rotate;
}

prog amble(loc) {
  equal(position, loc) -> nil;
  clear-path(position, loc) -> goto(loc);
  T -> amble(new-point(position, loc));
}
"""


def test_parse_goto():
    lib = parse(GOTO_SRC)
    prog = lib.programs["goto"]
    assert prog.params == ("loc",)
    assert len(prog.rules) == 3
    r1, r2, r3 = prog.rules
    assert isinstance(r1.condition, Near) and r1.condition.eps_in is None
    assert r1.condition.a == Var("position") and r1.condition.b == Var("loc")
    assert r1.action == NilAction()
    assert r2.action == PrimitiveAction("move")
    assert r3.condition == TrueExpr()
    assert r3.action == PrimitiveAction("rotate")


def test_parse_minimal_program():
    lib = parse("prog p() { T -> nil; }")
    prog = lib.programs["p"]
    assert prog.params == ()
    assert len(prog.rules) == 1
    assert prog.rules[0].condition == TrueExpr()
    assert prog.rules[0].action == NilAction()


def test_rule_order_preserved():
    # Shuffled conditions: textual order must survive into the AST.
    src = """
    env a, b, c;
    primitive act;
    prog p() { c -> act; a -> act; b -> nil; }
    """
    lib = parse(src)
    conds = [r.condition for r in lib.programs["p"].rules]
    assert conds == [Var("c"), Var("a"), Var("b")]


def test_angles_normalize():
    lib = parse("prog p() { near(heading, 90deg, 0.1, 0.2) -> nil; }")
    near = lib.programs["p"].rules[0].condition
    assert near.b == AngleLit(math.pi / 2)
    lib = parse("prog p() { near(heading, 270deg, 0.1, 0.2) -> nil; }")
    near = lib.programs["p"].rules[0].condition
    assert near.b.radians == pytest.approx(-math.pi / 2)
    assert -math.pi < near.b.radians <= math.pi


def test_operator_precedence():
    lib = parse("env a, b, c; prog p() { not a and b or c -> nil; }")
    cond = lib.programs["p"].rules[0].condition
    assert cond == Or((And((Not(Var("a")), Var("b"))), Var("c")))


def test_point_literal_folding():
    lib = parse("env f(1); prog p(x) { f(point(1, 2)) and f(point(x, 2.0)) -> nil; }")
    cond = lib.programs["p"].rules[0].condition
    first, second = cond.operands
    assert first.args[0] == PointLit(1.0, 2.0)
    # Non-literal arguments stay a call, resolved at runtime.
    assert second.args[0].name == "point"


def test_action_call_resolution():
    lib = parse(AMBLE_SRC)
    amble = lib.programs["amble"]
    assert isinstance(amble.rules[1].action, ProgramCallAction)  # goto(loc)
    assert isinstance(amble.rules[2].action, ProgramCallAction)  # amble(...)
    assert isinstance(lib.programs["goto"].rules[1].action, PrimitiveAction)


def test_amble_validates_clean():
    # Recursion (direct or mutual) is legal.
    lib = parse(AMBLE_SRC)
    assert validate(lib) == []


def test_validate_unresolved_action():
    lib = parse("prog p() { T -> fly(); }")
    diags = validate(lib)
    assert any(d.code == "unresolved-name" and "fly" in d.message for d in diags)


def test_validate_call_arity():
    lib = parse(GOTO_SRC + "\nprog q() { T -> goto(point(1,1), point(2,2)); }")
    diags = validate(lib)
    assert any(d.code == "arity-mismatch" and "goto" in d.message for d in diags)


def test_validate_unbound_variable():
    lib = parse("prog p() { mystery -> nil; }")
    diags = validate(lib)
    assert any(d.code == "unbound-variable" for d in diags)


def test_validate_zero_rule_program():
    lib = parse("prog p() { }")
    diags = validate(lib)
    assert any(d.code == "empty-program" for d in diags)


def test_duplicate_name_rejected():
    with pytest.raises(ParseError) as exc:
        parse("prog p() { T -> nil; } prog p() { T -> nil; }")
    assert any(d.code == "duplicate-name" for d in exc.value.diagnostics)


def test_parallel_action_set_rejected():
    with pytest.raises(ParseError) as exc:
        parse("primitive a, b; prog p() { T -> {a, b}; }")
    assert any(d.code == "not-supported" for d in exc.value.diagnostics)


def test_bad_tolerance_rejected():
    with pytest.raises(ParseError) as exc:
        parse("env x; prog p() { near(x, 0.0, 0.2, 0.1) -> nil; }")
    assert any(d.code == "invalid-tolerance" for d in exc.value.diagnostics)


def test_syntax_error_position_in_bounds():
    src = "prog p() {\n  T -> ;\n}"
    with pytest.raises(ParseError) as exc:
        parse(src)
    lines = src.split("\n")
    for diag in exc.value.diagnostics:
        assert 1 <= diag.span.line <= len(lines)
        assert 1 <= diag.span.col <= len(lines[diag.span.line - 1]) + 1


def test_rule_spans_inside_source():
    src = GOTO_SRC
    lib = parse(src)
    lines = src.split("\n")
    for rule in lib.programs["goto"].rules:
        assert rule.span is not None
        assert 1 <= rule.span.line <= len(lines)


def test_pretty_empty_params():
    lib = parse("prog p() { T -> nil; }")
    assert "prog p()" in pretty(lib)


def test_pretty_one_rule_per_line():
    lib = parse(GOTO_SRC)
    text = pretty(lib)
    body = text.split("{", 1)[1]
    assert body.count("->") == 3
    rule_lines = [l for l in text.splitlines() if "->" in l]
    assert len(rule_lines) == 3


def test_tree_parses_and_round_trips():
    src = """
    env p, q, r;
    primitive a, b;
    tree t() {
      root: p;
      node n1: q, a => root;
      node n2: r, b => n1, cost 2.5;
    }
    """
    lib = parse(src)
    tree = lib.trees["t"]
    assert tree.root.id == "root" and tree.root.parent is None
    assert tree.node("n2").parent == "n1"
    assert tree.node("n2").arc_cost == 2.5
    assert tree.cost_to_root("n2") == 3.5
    assert parse(pretty(lib)) == lib


def test_tree_unknown_parent_rejected():
    with pytest.raises(ParseError):
        parse("primitive a; tree t() { root: T; node n1: T, a => ghost; }")


def test_tree_needs_exactly_one_root():
    with pytest.raises(ParseError):
        parse("tree t() { node n1: T, nil => root; }")
    with pytest.raises(ParseError):
        parse("tree t() { root: T; root: T; }")


def test_entry_parsing():
    lib = parse(GOTO_SRC)
    entry = parse_action_term("goto(point(10, 10))", lib)
    assert isinstance(entry, ProgramCallAction)
    assert entry.args == (PointLit(10.0, 10.0),)


# --- round-trip corpus -------------------------------------------------------


class _Gen:
    """Random valid-library generator for round-trip checks."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.env0 = [f"s{i}" for i in range(4)]
        self.env2 = ["f2"]
        self.prims = ["act0", "act1"]
        self.prog_names = [f"p{i}" for i in range(3)]

    def expr(self, params, depth=0):
        rng = self.rng
        choices = ["true", "var", "num", "angle", "point", "call", "near", "equal"]
        if depth < 2:
            choices += ["not", "and", "or"]
        kind = rng.choice(choices)
        if kind == "true":
            return TrueExpr()
        if kind == "var":
            pool = self.env0 + list(params)
            return Var(rng.choice(pool))
        if kind == "num":
            return Number(round(rng.uniform(-20, 20), 3))
        if kind == "angle":
            return AngleLit(round(rng.uniform(-3, 3), 4))
        if kind == "point":
            return PointLit(round(rng.uniform(-9, 9), 2), round(rng.uniform(-9, 9), 2))
        if kind == "call":
            return self._call(params, depth)
        if kind == "near":
            lo = round(rng.uniform(0.01, 0.5), 3)
            hi = round(lo + rng.uniform(0.0, 0.5), 3)
            return Near(self.expr(params, depth + 1), self.expr(params, depth + 1), lo, hi,
                        site=-1)
        if kind == "equal":
            return Near(self.expr(params, depth + 1), self.expr(params, depth + 1), None, None,
                        site=-1)
        if kind == "not":
            return Not(self.expr(params, depth + 1))
        ops = tuple(self.expr(params, depth + 1) for _ in range(rng.randint(2, 3)))
        return And(ops) if kind == "and" else Or(ops)

    def _call(self, params, depth):
        name = self.rng.choice(self.env2)
        return Call_alias(name, (self.expr(params, depth + 1), self.expr(params, depth + 1)))

    def action(self, params):
        rng = self.rng
        kind = rng.choice(["nil", "prim", "call"])
        if kind == "nil":
            return NilAction()
        if kind == "prim":
            return PrimitiveAction(rng.choice(self.prims), ())
        callee = rng.choice(self.prog_names)
        return ProgramCallAction(callee, (self.expr(("x",)),))

    def library(self) -> Library:
        lib = Library(
            primitives={name: 0 for name in self.prims},
            env_symbols={**{n: 0 for n in self.env0}, **{n: 2 for n in self.env2}},
        )
        from teleo.lang import Program, Rule

        for name in self.prog_names:
            rules = tuple(
                Rule(self.expr(("x",)), self.action(("x",)))
                for _ in range(self.rng.randint(1, 4))
            )
            lib.programs[name] = Program(name, ("x",), rules)
        return lib


from teleo.lang import Call as Call_alias  # noqa: E402


@pytest.mark.parametrize("seed", range(100))
def test_round_trip_random_corpus(seed):
    lib = _Gen(random.Random(seed)).library()
    text = pretty(lib)
    reparsed = parse(text)
    assert reparsed == lib, text
    # parse . pretty . parse == parse
    assert parse(pretty(reparsed)) == reparsed


def test_round_trip_handwritten_sources():
    for src in (GOTO_SRC, AMBLE_SRC):
        lib = parse(src)
        assert parse(pretty(lib)) == lib
