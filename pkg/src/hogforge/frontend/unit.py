"""Parsed compilation unit: canonical text plus AST plus name table."""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import TokenKind, tokenize
from .nodes import Decl, FunctionDef, walk
from .parser import parse_function_text
from .printer import function_to_text


def declared_names(fn: FunctionDef) -> set:
    names = {pname for _, pname in fn.params}
    for node in walk(fn):
        if isinstance(node, Decl):
            names.update(d.name for d in node.declarators)
    return names


def identifier_order(fn: FunctionDef, canonical_text: str) -> list:
    """Declared names, ordered by first appearance in the token stream."""
    declared = declared_names(fn)
    order = []
    for tok in tokenize(canonical_text):
        if tok.kind is TokenKind.IDENTIFIER and tok.text in declared and tok.text not in order:
            order.append(tok.text)
    return order


@dataclass
class SourceUnit:
    unit_id: str
    ast: FunctionDef
    text: str = ""
    identifiers: list = field(default_factory=list)

    @classmethod
    def from_ast(cls, fn: FunctionDef, unit_id: str = "") -> "SourceUnit":
        text = function_to_text(fn)
        return cls(unit_id=unit_id, ast=fn, text=text,
                   identifiers=identifier_order(fn, text))


def parse_unit(source: str, unit_id: str = "") -> SourceUnit:
    """Parse raw source into canonical form.

    The stored text is the printer's rendering, not the input, so two
    units that differ only in whitespace or comments come out identical.
    """
    fn = parse_function_text(source)
    return SourceUnit.from_ast(fn, unit_id=unit_id)
