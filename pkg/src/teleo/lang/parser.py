"""Lexer and recursive-descent parser for the ``.tr`` source language.

Grammar sketch::

    library : decl*
    decl    : 'primitive' items ';' | 'env' items ';' | prog | tree
    items   : IDENT [ '(' INT ')' ] (',' IDENT [ '(' INT ')' ])*
    prog    : 'prog' IDENT '(' [params] ')' '{' rule* '}'
    rule    : cond '->' action ';'
    tree    : 'tree' IDENT '(' [params] ')' '{' rootdecl node* '}'
    rootdecl: 'root' ':' cond ';'
    node    : 'node' IDENT ':' cond ',' action '=>' ('root'|IDENT)
              [',' 'cost' NUMBER] ';'
    action  : 'nil' | IDENT [ '(' [exprs] ')' ]
    cond    : conj ('or' conj)*
    conj    : neg ('and' neg)*
    neg     : 'not' neg | cmp
    cmp     : primary [ '==' primary ]
    primary : 'T' | 'true' | 'false' | NUMBER | ANGLE | '-' (NUMBER|ANGLE)
            | IDENT [ '(' [exprs] ')' ] | '(' cond ')'

Identifiers allow interior hyphens (``clear-path``); ``//`` comments run
to end of line.  Angle literals carry a ``deg`` or ``rad`` suffix and are
normalized to (-pi, pi].  ``equal(a, b)`` and ``a == b`` desugar to a
default-tolerance proximity test; ``near(a, b, in, out)`` gives explicit
thresholds.  ``point(x, y)`` with literal arguments folds to a point
literal.  Parse failures carry positioned diagnostics and never yield a
partial library.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

from . import ast

KEYWORDS = frozenset(
    {
        "prog",
        "tree",
        "node",
        "root",
        "cost",
        "T",
        "nil",
        "not",
        "and",
        "or",
        "true",
        "false",
        "primitive",
        "env",
    }
)

# Names with builtin parse- or eval-time meaning; not declarable.
RESERVED_CALLS = frozenset({"equal", "near", "point"})

BUILTIN_ARITIES = {"point": 2}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[\ \t\r\n]+)
    | (?P<comment>//[^\n]*)
    | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?:deg|rad)?)
    | (?P<ident>[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
    | (?P<arrow>->)
    | (?P<darrow>=>)
    | (?P<eqeq>==)
    | (?P<sym>[(){},;:\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'NUMBER', 'ANGLE', 'IDENT', a keyword, a symbol, or 'EOF'
    text: str
    value: object
    line: int
    col: int

    @property
    def span(self) -> ast.Span:
        return ast.Span(self.line, self.col, self.line, self.col + max(len(self.text), 1))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: ast.Span

    def __str__(self) -> str:
        return f"{self.span}: {self.code}: {self.message}"


class ParseError(Exception):
    """Raised when a source unit cannot be turned into a library."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            span = ast.Span(line, col, line, col + 1)
            raise ParseError(
                [Diagnostic("syntax-error", f"unexpected character {source[pos]!r}", span)]
            )
        text = m.group(0)
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            pass
        elif kind == "number":
            if text.endswith("deg"):
                tokens.append(
                    Token("ANGLE", text, ast.wrap_angle(math.radians(float(text[:-3]))), line, col)
                )
            elif text.endswith("rad"):
                tokens.append(Token("ANGLE", text, ast.wrap_angle(float(text[:-3])), line, col))
            else:
                tokens.append(Token("NUMBER", text, float(text), line, col))
        elif kind == "ident":
            tok_kind = text if text in KEYWORDS else "IDENT"
            tokens.append(Token(tok_kind, text, text, line, col))
        else:  # arrow / darrow / eqeq / sym
            tokens.append(Token(text, text, text, line, col))
        # advance position
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("EOF", "", None, line, col))
    return tokens


@dataclass
class _RawAction:
    """Action term before primitive-vs-call resolution."""

    name: Optional[str]  # None = nil
    args: tuple[ast.Expr, ...]
    span: ast.Span


class _Parser:
    def __init__(self, tokens: list[Token], site_start: int = 0):
        self.tokens = tokens
        self.pos = 0
        self.site = site_start
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str) -> bool:
        return self.tokens[self.pos].kind == kind

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok)
        return self.advance()

    def fail(self, message: str, tok: Optional[Token] = None, code: str = "syntax-error"):
        tok = tok or self.peek()
        self.diagnostics.append(Diagnostic(code, message, tok.span))
        raise ParseError(self.diagnostics)

    def fresh_site(self) -> int:
        s = self.site
        self.site += 1
        return s

    # -- expressions -------------------------------------------------------

    def parse_condition(self) -> ast.Expr:
        return self._or()

    def _or(self) -> ast.Expr:
        parts = [self._and()]
        while self.at("or"):
            self.advance()
            parts.append(self._and())
        return parts[0] if len(parts) == 1 else ast.Or(tuple(parts))

    def _and(self) -> ast.Expr:
        parts = [self._not()]
        while self.at("and"):
            self.advance()
            parts.append(self._not())
        return parts[0] if len(parts) == 1 else ast.And(tuple(parts))

    def _not(self) -> ast.Expr:
        if self.at("not"):
            self.advance()
            return ast.Not(self._not())
        return self._cmp()

    def _cmp(self) -> ast.Expr:
        left = self._primary()
        if self.at("=="):
            self.advance()
            right = self._primary()
            return ast.Near(left, right, None, None, site=self.fresh_site())
        return left

    def _primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind in ("T", "true"):
            self.advance()
            return ast.TrueExpr()
        if tok.kind == "false":
            self.advance()
            return ast.Not(ast.TrueExpr())
        if tok.kind == "NUMBER":
            self.advance()
            return ast.Number(tok.value)
        if tok.kind == "ANGLE":
            self.advance()
            return ast.AngleLit(tok.value)
        if tok.kind == "-":
            self.advance()
            lit = self.peek()
            if lit.kind == "NUMBER":
                self.advance()
                return ast.Number(-lit.value)
            if lit.kind == "ANGLE":
                self.advance()
                return ast.AngleLit(ast.wrap_angle(-lit.value))
            self.fail("expected a number or angle after unary '-'", lit)
        if tok.kind == "(":
            self.advance()
            inner = self.parse_condition()
            self.expect(")")
            return inner
        if tok.kind == "IDENT":
            self.advance()
            if not self.at("("):
                return ast.Var(tok.value)
            self.advance()
            args: list[ast.Expr] = []
            if not self.at(")"):
                args.append(self.parse_condition())
                while self.at(","):
                    self.advance()
                    args.append(self.parse_condition())
            self.expect(")")
            return self._make_call(tok, tuple(args))
        self.fail(f"expected an expression, found {tok.text or 'end of input'!r}", tok)

    def _make_call(self, name_tok: Token, args: tuple[ast.Expr, ...]) -> ast.Expr:
        name = name_tok.value
        if name == "equal":
            if len(args) != 2:
                self.fail("equal takes exactly 2 arguments", name_tok, code="arity-mismatch")
            return ast.Near(args[0], args[1], None, None, site=self.fresh_site())
        if name == "near":
            if len(args) != 4:
                self.fail("near takes exactly 4 arguments", name_tok, code="arity-mismatch")
            eps = []
            for e in args[2:]:
                if isinstance(e, ast.Number):
                    eps.append(e.value)
                elif isinstance(e, ast.AngleLit):
                    eps.append(abs(e.radians))
                else:
                    self.fail(
                        "near thresholds must be literal numbers or angles",
                        name_tok,
                        code="invalid-tolerance",
                    )
            eps_in, eps_out = eps
            if not (0 < eps_in <= eps_out):
                self.fail(
                    f"near thresholds must satisfy 0 < eps_in <= eps_out, got {eps_in}, {eps_out}",
                    name_tok,
                    code="invalid-tolerance",
                )
            return ast.Near(args[0], args[1], eps_in, eps_out, site=self.fresh_site())
        if name == "point" and len(args) == 2 and all(isinstance(a, ast.Number) for a in args):
            return ast.PointLit(args[0].value, args[1].value)
        return ast.Call(name, args, site=self.fresh_site())

    # -- actions -------------------------------------------------------------

    def parse_raw_action(self) -> _RawAction:
        tok = self.peek()
        if tok.kind == "nil":
            self.advance()
            return _RawAction(None, (), tok.span)
        if tok.kind == "{":
            self.fail(
                "parallel action sets are not supported",
                tok,
                code="not-supported",
            )
        if tok.kind != "IDENT":
            self.fail(f"expected an action, found {tok.text or 'end of input'!r}", tok)
        self.advance()
        args: tuple[ast.Expr, ...] = ()
        if self.at("("):
            self.advance()
            collected: list[ast.Expr] = []
            if not self.at(")"):
                collected.append(self.parse_condition())
                while self.at(","):
                    self.advance()
                    collected.append(self.parse_condition())
            self.expect(")")
            args = tuple(collected)
        return _RawAction(tok.value, args, tok.span)

    # -- declarations ----------------------------------------------------------

    def parse_params(self) -> tuple[str, ...]:
        self.expect("(")
        params: list[str] = []
        if self.at("IDENT"):
            params.append(self.advance().value)
            while self.at(","):
                self.advance()
                tok = self.expect("IDENT")
                params.append(tok.value)
        close = self.peek()
        self.expect(")")
        if len(set(params)) != len(params):
            self.fail("duplicate parameter name", close, code="duplicate-name")
        return tuple(params)

    def parse_decl_items(self) -> list[tuple[str, int, ast.Span]]:
        items = []
        while True:
            tok = self.expect("IDENT")
            arity = 0
            if self.at("("):
                self.advance()
                num = self.expect("NUMBER")
                if num.value != int(num.value) or num.value < 0:
                    self.fail("arity must be a non-negative integer", num)
                arity = int(num.value)
                self.expect(")")
            items.append((tok.value, arity, tok.span))
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(";")
        return items


@dataclass
class _RawRule:
    condition: ast.Expr
    action: _RawAction
    span: ast.Span


@dataclass
class _RawProgram:
    name: str
    params: tuple[str, ...]
    rules: list[_RawRule]
    span: ast.Span


@dataclass
class _RawNode:
    id: str
    condition: ast.Expr
    action: Optional[_RawAction]  # None for the root
    parent: Optional[str]
    cost: float
    span: ast.Span


@dataclass
class _RawTree:
    name: str
    params: tuple[str, ...]
    nodes: list[_RawNode]
    span: ast.Span


def _parse_program_body(p: _Parser, name: str, params, span) -> _RawProgram:
    p.expect("{")
    rules: list[_RawRule] = []
    while not p.at("}"):
        start = p.peek()
        cond = p.parse_condition()
        p.expect("->")
        action = p.parse_raw_action()
        end = p.peek()
        p.expect(";")
        rules.append(
            _RawRule(cond, action, ast.Span(start.line, start.col, end.line, end.col + 1))
        )
    p.expect("}")
    return _RawProgram(name, params, rules, span)


def _parse_tree_body(p: _Parser, name: str, params, span) -> _RawTree:
    p.expect("{")
    nodes: list[_RawNode] = []
    saw_root = False
    while not p.at("}"):
        tok = p.peek()
        if tok.kind == "root":
            p.advance()
            if saw_root:
                p.fail("tree has more than one root", tok, code="duplicate-name")
            saw_root = True
            p.expect(":")
            cond = p.parse_condition()
            p.expect(";")
            nodes.insert(0, _RawNode("root", cond, None, None, 0.0, tok.span))
        elif tok.kind == "node":
            p.advance()
            id_tok = p.expect("IDENT")
            p.expect(":")
            cond = p.parse_condition()
            p.expect(",")
            action = p.parse_raw_action()
            p.expect("=>")
            parent_tok = p.peek()
            if parent_tok.kind == "root":
                p.advance()
                parent = "root"
            else:
                parent = p.expect("IDENT").value
            cost = 1.0
            if p.at(","):
                p.advance()
                p.expect("cost")
                cost_tok = p.expect("NUMBER")
                if cost_tok.value < 0:
                    p.fail("arc cost must be >= 0", cost_tok)
                cost = cost_tok.value
            p.expect(";")
            nodes.append(_RawNode(id_tok.value, cond, action, parent, cost, id_tok.span))
        else:
            p.fail(f"expected 'root' or 'node', found {tok.text!r}", tok)
    p.expect("}")
    if not saw_root:
        p.fail(f"tree {name!r} declares no root", p.peek(), code="syntax-error")
    return _RawTree(name, params, nodes, span)


def _parse_declarations(p: _Parser):
    primitives: dict[str, int] = {}
    env_symbols: dict[str, int] = {}
    raw_programs: list[_RawProgram] = []
    raw_trees: list[_RawTree] = []
    while not p.at("EOF"):
        tok = p.peek()
        if tok.kind == "primitive":
            p.advance()
            for name, arity, span in p.parse_decl_items():
                _declare(p, primitives, env_symbols, name, arity, span, into="primitive")
        elif tok.kind == "env":
            p.advance()
            for name, arity, span in p.parse_decl_items():
                _declare(p, primitives, env_symbols, name, arity, span, into="env")
        elif tok.kind == "prog":
            p.advance()
            name_tok = p.expect("IDENT")
            params = p.parse_params()
            raw_programs.append(_parse_program_body(p, name_tok.value, params, name_tok.span))
        elif tok.kind == "tree":
            p.advance()
            name_tok = p.expect("IDENT")
            params = p.parse_params()
            raw_trees.append(_parse_tree_body(p, name_tok.value, params, name_tok.span))
        else:
            p.fail(
                f"expected 'prog', 'tree', 'primitive' or 'env', found {tok.text or 'end of input'!r}",
                tok,
            )
    return primitives, env_symbols, raw_programs, raw_trees


def _declare(p: _Parser, primitives, env_symbols, name, arity, span, into: str):
    if name in RESERVED_CALLS:
        p.diagnostics.append(
            Diagnostic("duplicate-name", f"{name!r} is a builtin and cannot be declared", span)
        )
        raise ParseError(p.diagnostics)
    if name in primitives or name in env_symbols:
        p.diagnostics.append(Diagnostic("duplicate-name", f"{name!r} declared twice", span))
        raise ParseError(p.diagnostics)
    (primitives if into == "primitive" else env_symbols)[name] = arity


def _resolve_action(raw: _RawAction, library: ast.Library, diags: list[Diagnostic]) -> ast.ActionTerm:
    if raw.name is None:
        return ast.NilAction()
    if library.lookup_callable(raw.name) is not None:
        return ast.ProgramCallAction(raw.name, raw.args)
    # Unknown names fall through as primitives; validate() reports them.
    return ast.PrimitiveAction(raw.name, raw.args)


def _assemble(p: _Parser, primitives, env_symbols, raw_programs, raw_trees) -> ast.Library:
    library = ast.Library(primitives=primitives, env_symbols=env_symbols)
    diags: list[Diagnostic] = []
    for rp in raw_programs:
        if library.lookup_callable(rp.name) is not None or rp.name in RESERVED_CALLS:
            diags.append(Diagnostic("duplicate-name", f"{rp.name!r} declared twice", rp.span))
            continue
        library.programs[rp.name] = ast.Program(rp.name, rp.params, (), span=rp.span)
    for rt in raw_trees:
        if library.lookup_callable(rt.name) is not None or rt.name in RESERVED_CALLS:
            diags.append(Diagnostic("duplicate-name", f"{rt.name!r} declared twice", rt.span))
            continue
        library.trees[rt.name] = ast.Tree(rt.name, rt.params, (), span=rt.span)
    for name in list(library.programs) + list(library.trees):
        if name in primitives or name in env_symbols:
            diags.append(
                Diagnostic(
                    "duplicate-name",
                    f"{name!r} is declared both as a program/tree and as a symbol",
                    library.lookup_callable(name).span,
                )
            )
    if diags:
        raise ParseError(diags)

    for rp in raw_programs:
        rules = tuple(
            ast.Rule(r.condition, _resolve_action(r.action, library, diags), span=r.span)
            for r in rp.rules
        )
        library.programs[rp.name] = ast.Program(rp.name, rp.params, rules, span=rp.span)

    for rt in raw_trees:
        seen: dict[str, _RawNode] = {}
        for rn in rt.nodes:
            if rn.id in seen:
                diags.append(
                    Diagnostic("duplicate-name", f"node {rn.id!r} declared twice", rn.span)
                )
            seen[rn.id] = rn
        for rn in rt.nodes:
            if rn.parent is not None and rn.parent not in seen:
                diags.append(
                    Diagnostic(
                        "unresolved-name", f"node parent {rn.parent!r} does not exist", rn.span
                    )
                )
        if diags:
            raise ParseError(diags)
        # Reject parent cycles: every node must reach the root.
        for rn in rt.nodes:
            hops, cur = 0, rn
            while cur.parent is not None:
                cur = seen[cur.parent]
                hops += 1
                if hops > len(rt.nodes):
                    diags.append(
                        Diagnostic("syntax-error", f"node {rn.id!r} is on a parent cycle", rn.span)
                    )
                    break
        if diags:
            raise ParseError(diags)
        nodes = tuple(
            ast.TreeNode(
                rn.id,
                rn.condition,
                rn.parent,
                None if rn.action is None else _resolve_action(rn.action, library, diags),
                rn.cost,
                decl_index=i,
            )
            for i, rn in enumerate(rt.nodes)
        )
        library.trees[rt.name] = ast.Tree(rt.name, rt.params, nodes, span=rt.span)

    library.site_count = p.site
    return library


def parse(source: str) -> ast.Library:
    """Parse a source unit into a library, or raise ParseError.

    No partial library is ever produced: any diagnostic aborts.
    """
    p = _Parser(tokenize(source))
    parts = _parse_declarations(p)
    return _assemble(p, *parts)


def parse_action_term(source: str, library: ast.Library) -> ast.ActionTerm:
    """Parse a standalone action term (e.g. a scenario entry) against a library.

    Hysteresis sites continue from the library's counter so entry
    expressions never collide with program expressions.
    """
    p = _Parser(tokenize(source), site_start=library.site_count)
    raw = p.parse_raw_action()
    if not p.at("EOF"):
        p.fail(f"unexpected trailing input {p.peek().text!r}")
    diags: list[Diagnostic] = []
    action = _resolve_action(raw, library, diags)
    library.site_count = p.site
    return action
