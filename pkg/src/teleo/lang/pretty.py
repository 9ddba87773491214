"""Canonical formatter for libraries: parse(pretty(lib)) == lib structurally."""

from __future__ import annotations

from . import ast

# Higher binds tighter.  Atoms are 4.
_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def _prec(e: ast.Expr) -> int:
    if isinstance(e, ast.Or):
        return _PREC_OR
    if isinstance(e, ast.And):
        return _PREC_AND
    if isinstance(e, ast.Not):
        return _PREC_NOT
    return _PREC_ATOM


def format_expr(e: ast.Expr) -> str:
    if isinstance(e, ast.TrueExpr):
        return "T"
    if isinstance(e, ast.Number):
        return repr(e.value)
    if isinstance(e, ast.AngleLit):
        # 'rad' keeps the float exact; humans may write 'deg' in source.
        return f"{e.radians!r}rad"
    if isinstance(e, ast.PointLit):
        return f"point({e.x!r}, {e.y!r})"
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, ast.Not):
        inner = format_expr(e.operand)
        if _prec(e.operand) < _PREC_NOT:
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(e, (ast.And, ast.Or)):
        word = " and " if isinstance(e, ast.And) else " or "
        own = _prec(e)
        parts = []
        for op in e.operands:
            s = format_expr(op)
            # Parenthesize children at the same or lower precedence so the
            # printed text reparses to the identical nesting.
            if _prec(op) <= own:
                s = f"({s})"
            parts.append(s)
        return word.join(parts)
    if isinstance(e, ast.Near):
        a, b = format_expr(e.a), format_expr(e.b)
        if e.eps_in is None:
            return f"equal({a}, {b})"
        return f"near({a}, {b}, {e.eps_in!r}, {e.eps_out!r})"
    raise TypeError(f"not an expression: {e!r}")


def format_action(a: ast.ActionTerm) -> str:
    if isinstance(a, ast.NilAction):
        return "nil"
    if not a.args:
        return a.name
    return f"{a.name}({', '.join(format_expr(x) for x in a.args)})"


def _format_decl_items(table: dict[str, int]) -> list[str]:
    return [name if arity == 0 else f"{name}({arity})" for name, arity in table.items()]


def pretty(library: ast.Library) -> str:
    out: list[str] = []
    if library.primitives:
        out.append(f"primitive {', '.join(_format_decl_items(library.primitives))};")
    if library.env_symbols:
        out.append(f"env {', '.join(_format_decl_items(library.env_symbols))};")
    if out:
        out.append("")
    for prog in library.programs.values():
        out.append(f"prog {prog.name}({', '.join(prog.params)}) {{")
        for rule in prog.rules:
            out.append(f"  {format_expr(rule.condition)} -> {format_action(rule.action)};")
        out.append("}")
        out.append("")
    for tree in library.trees.values():
        out.append(f"tree {tree.name}({', '.join(tree.params)}) {{")
        for node in tree.nodes:
            if node.parent is None:
                out.append(f"  root: {format_expr(node.condition)};")
            else:
                cost = "" if node.arc_cost == 1.0 else f", cost {node.arc_cost!r}"
                out.append(
                    f"  node {node.id}: {format_expr(node.condition)}, "
                    f"{format_action(node.action_to_parent)} => {node.parent}{cost};"
                )
        out.append("}")
        out.append("")
    return "\n".join(out).rstrip() + "\n"
