"""Name, arity and scope checks over a parsed library.

Recursion, direct or mutual, is legal and never reported.  Diagnostics
are the return value; an empty list means the library is well-formed.
"""

from __future__ import annotations

from . import ast
from .parser import BUILTIN_ARITIES, Diagnostic


def _check_expr(e: ast.Expr, params: frozenset[str], lib: ast.Library, span, diags):
    if isinstance(e, (ast.TrueExpr, ast.Number, ast.AngleLit, ast.PointLit)):
        return
    if isinstance(e, ast.Var):
        if e.name in params:
            return
        arity = lib.env_symbols.get(e.name)
        if arity is None:
            diags.append(
                Diagnostic("unbound-variable", f"{e.name!r} is not a parameter or symbol", span)
            )
        elif arity != 0:
            diags.append(
                Diagnostic(
                    "arity-mismatch",
                    f"{e.name!r} takes {arity} argument(s), used as a plain variable",
                    span,
                )
            )
        return
    if isinstance(e, ast.Call):
        arity = lib.env_symbols.get(e.name, BUILTIN_ARITIES.get(e.name))
        if arity is None:
            diags.append(Diagnostic("unresolved-name", f"unknown function {e.name!r}", span))
        elif arity != len(e.args):
            diags.append(
                Diagnostic(
                    "arity-mismatch",
                    f"{e.name!r} takes {arity} argument(s), got {len(e.args)}",
                    span,
                )
            )
        for a in e.args:
            _check_expr(a, params, lib, span, diags)
        return
    if isinstance(e, ast.Not):
        _check_expr(e.operand, params, lib, span, diags)
        return
    if isinstance(e, (ast.And, ast.Or)):
        for op in e.operands:
            _check_expr(op, params, lib, span, diags)
        return
    if isinstance(e, ast.Near):
        _check_expr(e.a, params, lib, span, diags)
        _check_expr(e.b, params, lib, span, diags)
        return
    raise TypeError(f"not an expression: {e!r}")


def _check_action(a: ast.ActionTerm, params: frozenset[str], lib: ast.Library, span, diags):
    if isinstance(a, ast.NilAction):
        return
    for arg in a.args:
        _check_expr(arg, params, lib, span, diags)
    if isinstance(a, ast.ProgramCallAction):
        callee = lib.lookup_callable(a.name)
        if len(callee.params) != len(a.args):
            diags.append(
                Diagnostic(
                    "arity-mismatch",
                    f"{a.name!r} takes {len(callee.params)} argument(s), got {len(a.args)}",
                    span,
                )
            )
        return
    # Primitive
    arity = lib.primitives.get(a.name)
    if arity is None:
        diags.append(Diagnostic("unresolved-name", f"unknown action {a.name!r}", span))
    elif arity != len(a.args):
        diags.append(
            Diagnostic(
                "arity-mismatch",
                f"primitive {a.name!r} takes {arity} argument(s), got {len(a.args)}",
                span,
            )
        )


def validate(library: ast.Library) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for prog in library.programs.values():
        params = frozenset(prog.params)
        if not prog.rules:
            diags.append(
                Diagnostic("empty-program", f"program {prog.name!r} has no rules", prog.span)
            )
        for rule in prog.rules:
            span = rule.span or prog.span
            _check_expr(rule.condition, params, library, span, diags)
            _check_action(rule.action, params, library, span, diags)
    for tree in library.trees.values():
        params = frozenset(tree.params)
        for node in tree.nodes:
            _check_expr(node.condition, params, library, tree.span, diags)
            if node.action_to_parent is not None:
                _check_action(node.action_to_parent, params, library, tree.span, diags)
    return diags
