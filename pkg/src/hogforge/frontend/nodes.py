"""AST node definitions for the mini-C dialect.

All nodes are plain dataclasses. Equality is structural: `node_id` is
excluded from comparisons so two independently parsed programs with the
same shape compare equal. Node ids are assigned in pre-order by the
parser and are stable for a given source text; they serve as site
references for transformations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


TYPE_NAMES = ("int", "long", "size_t", "ssize_t", "void")

CONTROL_KEYWORDS = (
    "if", "else", "for", "while", "do", "switch", "case", "default",
    "break", "continue", "return",
)

KEYWORDS = frozenset(TYPE_NAMES) | frozenset(CONTROL_KEYWORDS)

# Callable from executable code without making the unit opaque.
BUILTIN_FUNCTIONS = ("print", "input", "abs", "min", "max")


@dataclass(eq=True)
class Node:
    node_id: int = field(default=-1, compare=False, repr=False)


# --- expressions ---------------------------------------------------------


@dataclass(eq=True)
class IntLit(Node):
    value: int = 0


@dataclass(eq=True)
class StrLit(Node):
    # Raw text between the quotes, escapes unprocessed. String literals
    # only appear as arguments to opaque calls; a unit containing one is
    # not executable.
    text: str = ""


@dataclass(eq=True)
class Var(Node):
    name: str = ""


@dataclass(eq=True)
class Unary(Node):
    op: str = ""
    operand: "Expr" = None


@dataclass(eq=True)
class Binary(Node):
    op: str = ""
    left: "Expr" = None
    right: "Expr" = None


@dataclass(eq=True)
class Call(Node):
    name: str = ""
    args: list = field(default_factory=list)


@dataclass(eq=True)
class Index(Node):
    name: str = ""
    index: "Expr" = None


Expr = Union[IntLit, StrLit, Var, Unary, Binary, Call, Index]


# --- statements ----------------------------------------------------------


@dataclass(eq=True)
class Block(Node):
    stmts: list = field(default_factory=list)


@dataclass(eq=True)
class Declarator(Node):
    name: str = ""
    array_size: Optional[int] = None
    init: Optional[Expr] = None


@dataclass(eq=True)
class Decl(Node):
    type_name: str = "int"
    declarators: list = field(default_factory=list)


@dataclass(eq=True)
class Assign(Node):
    target: Union[Var, Index] = None
    value: Expr = None


@dataclass(eq=True)
class If(Node):
    cond: Expr = None
    then: Block = None
    # None (no else), Block (braced else), or If (an `else if` chain).
    # The Block/If distinction is structural and survives round-trips.
    orelse: Union[Block, "If", None] = None


@dataclass(eq=True)
class For(Node):
    init: Union[Decl, Assign, None] = None
    cond: Optional[Expr] = None
    step: Optional[Assign] = None
    body: Block = None


@dataclass(eq=True)
class While(Node):
    cond: Expr = None
    body: Block = None


@dataclass(eq=True)
class DoWhile(Node):
    body: Block = None
    cond: Expr = None


@dataclass(eq=True)
class Case(Node):
    # label None marks the default case
    label: Optional[int] = None
    stmts: list = field(default_factory=list)


@dataclass(eq=True)
class Switch(Node):
    scrutinee: Expr = None
    cases: list = field(default_factory=list)


@dataclass(eq=True)
class Break(Node):
    pass


@dataclass(eq=True)
class Continue(Node):
    pass


@dataclass(eq=True)
class Return(Node):
    value: Optional[Expr] = None


@dataclass(eq=True)
class ExprStmt(Node):
    expr: Expr = None


@dataclass(eq=True)
class Empty(Node):
    pass


Stmt = Union[Block, Decl, Assign, If, For, While, DoWhile, Switch,
             Break, Continue, Return, ExprStmt, Empty]


@dataclass(eq=True)
class FunctionDef(Node):
    name: str = ""
    return_type: str = "int"
    params: list = field(default_factory=list)  # (type_name, identifier)
    body: Block = None


def children(node: Node) -> list:
    """Child nodes in source order."""
    if isinstance(node, FunctionDef):
        return [node.body]
    if isinstance(node, Block):
        return list(node.stmts)
    if isinstance(node, Decl):
        return list(node.declarators)
    if isinstance(node, Declarator):
        return [node.init] if node.init is not None else []
    if isinstance(node, Assign):
        return [node.target, node.value]
    if isinstance(node, If):
        out = [node.cond, node.then]
        if node.orelse is not None:
            out.append(node.orelse)
        return out
    if isinstance(node, For):
        return [c for c in (node.init, node.cond, node.step, node.body) if c is not None]
    if isinstance(node, While):
        return [node.cond, node.body]
    if isinstance(node, DoWhile):
        return [node.body, node.cond]
    if isinstance(node, Switch):
        return [node.scrutinee] + list(node.cases)
    if isinstance(node, Case):
        return list(node.stmts)
    if isinstance(node, Return):
        return [node.value] if node.value is not None else []
    if isinstance(node, ExprStmt):
        return [node.expr]
    if isinstance(node, Unary):
        return [node.operand]
    if isinstance(node, Binary):
        return [node.left, node.right]
    if isinstance(node, Call):
        return list(node.args)
    if isinstance(node, Index):
        return [node.index]
    return []


def walk(node: Node):
    """Pre-order traversal."""
    yield node
    for child in children(node):
        yield from walk(child)


def assign_ids(root: Node) -> None:
    """Number every node in pre-order, starting at 0."""
    for i, node in enumerate(walk(root)):
        node.node_id = i
