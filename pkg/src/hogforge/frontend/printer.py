"""Canonical source renderer.

Every body prints with braces, indentation is four spaces, and binary
expressions carry the minimum parentheses needed to reproduce the tree.
Printing the parse of any accepted program, then parsing that output,
yields a structurally identical AST.
"""

from __future__ import annotations

from .nodes import (
    Assign,
    Binary,
    Block,
    Break,
    Call,
    Case,
    Continue,
    Decl,
    DoWhile,
    Empty,
    ExprStmt,
    For,
    FunctionDef,
    If,
    IntLit,
    Index,
    Return,
    StrLit,
    Switch,
    Unary,
    Var,
    While,
)

_INDENT = "    "

_PRECEDENCE = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
_UNARY_PRECEDENCE = 11


def expr_to_text(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, StrLit):
        return f'"{expr.text}"'
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Index):
        return f"{expr.name}[{expr_to_text(expr.index)}]"
    if isinstance(expr, Call):
        args = ", ".join(expr_to_text(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, Unary):
        inner = expr_to_text(expr.operand)
        if isinstance(expr.operand, (Binary, Unary)):
            inner = f"({inner})"
        return f"{expr.op}{inner}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left = expr_to_text(expr.left)
        if isinstance(expr.left, Binary) and _PRECEDENCE[expr.left.op] < prec:
            left = f"({left})"
        right = expr_to_text(expr.right)
        # Same-tier right operands need parens: binaries associate left.
        if isinstance(expr.right, Binary) and _PRECEDENCE[expr.right.op] <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not an expression node: {type(expr).__name__}")


def _assign_to_text(stmt: Assign) -> str:
    return f"{expr_to_text(stmt.target)} = {expr_to_text(stmt.value)}"


def _decl_to_text(stmt: Decl) -> str:
    parts = []
    for d in stmt.declarators:
        if d.array_size is not None:
            parts.append(f"{d.name}[{d.array_size}]")
        elif d.init is not None:
            parts.append(f"{d.name} = {expr_to_text(d.init)}")
        else:
            parts.append(d.name)
    return f"{stmt.type_name} " + ", ".join(parts)


def _emit_block(block: Block, depth: int, lines: list) -> None:
    for stmt in block.stmts:
        _emit_statement(stmt, depth, lines)


def _emit_statement(stmt, depth: int, lines: list) -> None:
    pad = _INDENT * depth
    if isinstance(stmt, Block):
        lines.append(pad + "{")
        _emit_block(stmt, depth + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, Empty):
        lines.append(pad + ";")
    elif isinstance(stmt, Decl):
        lines.append(pad + _decl_to_text(stmt) + ";")
    elif isinstance(stmt, Assign):
        lines.append(pad + _assign_to_text(stmt) + ";")
    elif isinstance(stmt, ExprStmt):
        lines.append(pad + expr_to_text(stmt.expr) + ";")
    elif isinstance(stmt, Break):
        lines.append(pad + "break;")
    elif isinstance(stmt, Continue):
        lines.append(pad + "continue;")
    elif isinstance(stmt, Return):
        if stmt.value is None:
            lines.append(pad + "return;")
        else:
            lines.append(pad + f"return {expr_to_text(stmt.value)};")
    elif isinstance(stmt, If):
        _emit_if(stmt, depth, lines)
    elif isinstance(stmt, For):
        header = _for_header(stmt)
        lines.append(pad + f"for ({header}) {{")
        _emit_block(stmt.body, depth + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, While):
        lines.append(pad + f"while ({expr_to_text(stmt.cond)}) {{")
        _emit_block(stmt.body, depth + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, DoWhile):
        lines.append(pad + "do {")
        _emit_block(stmt.body, depth + 1, lines)
        lines.append(pad + f"}} while ({expr_to_text(stmt.cond)});")
    elif isinstance(stmt, Switch):
        lines.append(pad + f"switch ({expr_to_text(stmt.scrutinee)}) {{")
        for case in stmt.cases:
            label = "default" if case.label is None else f"case {case.label}"
            lines.append(pad + _INDENT + label + ":")
            for s in case.stmts:
                _emit_statement(s, depth + 2, lines)
        lines.append(pad + "}")
    else:
        raise TypeError(f"not a statement node: {type(stmt).__name__}")


def _for_header(stmt: For) -> str:
    if stmt.init is None:
        init = ""
    elif isinstance(stmt.init, Decl):
        init = _decl_to_text(stmt.init)
    else:
        init = _assign_to_text(stmt.init)
    cond = "" if stmt.cond is None else " " + expr_to_text(stmt.cond)
    step = "" if stmt.step is None else " " + _assign_to_text(stmt.step)
    return f"{init};{cond};{step}"


def _emit_if(stmt: If, depth: int, lines: list) -> None:
    pad = _INDENT * depth
    lines.append(pad + f"if ({expr_to_text(stmt.cond)}) {{")
    _emit_block(stmt.then, depth + 1, lines)
    node = stmt
    while True:
        orelse = node.orelse
        if orelse is None:
            lines.append(pad + "}")
            return
        if isinstance(orelse, If):
            lines.append(pad + f"}} else if ({expr_to_text(orelse.cond)}) {{")
            _emit_block(orelse.then, depth + 1, lines)
            node = orelse
            continue
        lines.append(pad + "} else {")
        _emit_block(orelse, depth + 1, lines)
        lines.append(pad + "}")
        return


def function_to_text(fn: FunctionDef) -> str:
    params = ", ".join(f"{t} {n}" for t, n in fn.params)
    lines = [f"{fn.return_type} {fn.name}({params}) {{"]
    _emit_block(fn.body, 1, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"
