"""Mini-C frontend: lexer, parser, canonical printer, evaluator."""

from .interp import (
    DEFAULT_STEP_LIMIT,
    ERR_ARRAY_OOB,
    ERR_BAD_CALL,
    ERR_DIV_BY_ZERO,
    ERR_UNDECLARED,
    HALT_ERROR,
    HALT_NORMAL,
    HALT_STEP_LIMIT,
    ExecTrace,
    is_executable,
    run_function,
    traces_equivalent,
    wrap64,
)
from .lexer import MiniCSyntaxError, Token, TokenKind, tokenize
from .nodes import (
    BUILTIN_FUNCTIONS,
    CONTROL_KEYWORDS,
    KEYWORDS,
    TYPE_NAMES,
    Assign,
    Binary,
    Block,
    Break,
    Call,
    Case,
    Continue,
    Decl,
    Declarator,
    DoWhile,
    Empty,
    ExprStmt,
    For,
    FunctionDef,
    If,
    IntLit,
    Index,
    Node,
    Return,
    StrLit,
    Switch,
    Unary,
    Var,
    While,
    assign_ids,
    children,
    walk,
)
from .parser import parse_function_text
from .printer import expr_to_text, function_to_text
from .unit import SourceUnit, declared_names, identifier_order, parse_unit

__all__ = [
    "DEFAULT_STEP_LIMIT", "ERR_ARRAY_OOB", "ERR_BAD_CALL", "ERR_DIV_BY_ZERO",
    "ERR_UNDECLARED", "HALT_ERROR", "HALT_NORMAL", "HALT_STEP_LIMIT",
    "ExecTrace", "is_executable", "run_function", "traces_equivalent", "wrap64",
    "MiniCSyntaxError", "Token", "TokenKind", "tokenize",
    "BUILTIN_FUNCTIONS", "CONTROL_KEYWORDS", "KEYWORDS", "TYPE_NAMES",
    "Assign", "Binary", "Block", "Break", "Call", "Case", "Continue",
    "Decl", "Declarator", "DoWhile", "Empty", "ExprStmt", "For",
    "FunctionDef", "If", "IntLit", "Index", "Node", "Return", "StrLit",
    "Switch", "Unary", "Var", "While",
    "assign_ids", "children", "walk",
    "parse_function_text", "expr_to_text", "function_to_text",
    "SourceUnit", "declared_names", "identifier_order", "parse_unit",
]
