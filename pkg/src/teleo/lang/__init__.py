"""The ``.tr`` language: syntax tree, parser, formatter, checks."""

from . import ast
from .ast import (
    ActionTerm,
    And,
    AngleLit,
    Call,
    Expr,
    Library,
    Near,
    NilAction,
    Not,
    Number,
    Or,
    PointLit,
    PrimitiveAction,
    Program,
    ProgramCallAction,
    Rule,
    Span,
    Tree,
    TreeNode,
    TrueExpr,
    Var,
    wrap_angle,
)
from .parser import Diagnostic, ParseError, parse, parse_action_term
from .pretty import format_action, format_expr, pretty
from .validate import validate

__all__ = [
    "ast",
    "ActionTerm",
    "And",
    "AngleLit",
    "Call",
    "Diagnostic",
    "Expr",
    "Library",
    "Near",
    "NilAction",
    "Not",
    "Number",
    "Or",
    "ParseError",
    "PointLit",
    "PrimitiveAction",
    "Program",
    "ProgramCallAction",
    "Rule",
    "Span",
    "Tree",
    "TreeNode",
    "TrueExpr",
    "Var",
    "format_action",
    "format_expr",
    "parse",
    "parse_action_term",
    "pretty",
    "validate",
    "wrap_angle",
]
