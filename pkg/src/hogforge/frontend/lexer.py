"""Tokenizer for the mini-C dialect."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .nodes import KEYWORDS


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    INT_LITERAL = "int_literal"
    STRING_LITERAL = "string_literal"
    OPERATOR = "operator"
    PUNCT = "punct"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    col: int

    @property
    def span(self) -> tuple:
        return (self.line, self.col)


class MiniCSyntaxError(Exception):
    """Raised for lexical and syntactic errors, with position and a hint."""

    def __init__(self, message: str, line: int, col: int, expected: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"{message} at line {line}, col {col}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


# Longest-match first. Multi-char operators must precede their prefixes.
_OPERATORS = [
    "<<=", ">>=",
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "++", "--",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~",
]

_PUNCT = "(){}[];,:"

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")
_HEX_DIGITS = _DIGITS | set("abcdefABCDEF")


def tokenize(source: str) -> list:
    """Lex `source` into a token list terminated by an EOF token.

    Comments (// and /* */) and whitespace are skipped and never appear
    in the stream, so the token list is invariant under comment and
    whitespace edits.
    """
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def error(msg, expected=""):
        raise MiniCSyntaxError(msg, line, col, expected)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            start_line, start_col = line, col
            i += 2
            col += 2
            while True:
                if i + 1 >= n:
                    raise MiniCSyntaxError(
                        "unterminated block comment", start_line, start_col, "*/")
                if source[i] == "*" and source[i + 1] == "/":
                    i += 2
                    col += 2
                    break
                if source[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            continue
        if ch in _IDENT_START:
            start = i
            start_col = col
            while i < n and source[i] in _IDENT_CONT:
                i += 1
                col += 1
            text = source[start:i]
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, text, line, start_col))
            continue
        if ch in _DIGITS:
            start = i
            start_col = col
            if ch == "0" and i + 1 < n and source[i + 1] in "xX":
                i += 2
                col += 2
                if i >= n or source[i] not in _HEX_DIGITS:
                    error("malformed hex literal", "hex digit")
                while i < n and source[i] in _HEX_DIGITS:
                    i += 1
                    col += 1
            else:
                while i < n and source[i] in _DIGITS:
                    i += 1
                    col += 1
            if i < n and source[i] in _IDENT_START:
                error(f"invalid character in number: {source[i]!r}")
            tokens.append(Token(TokenKind.INT_LITERAL, source[start:i], line, start_col))
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            start = i
            while True:
                if i >= n or source[i] == "\n":
                    raise MiniCSyntaxError(
                        "unterminated string literal", start_line, start_col, '"')
                if source[i] == "\\":
                    i += 2
                    col += 2
                    continue
                if source[i] == '"':
                    break
                i += 1
                col += 1
            tokens.append(Token(TokenKind.STRING_LITERAL, source[start:i], line, start_col))
            i += 1
            col += 1
            continue
        matched = False
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token(TokenKind.OPERATOR, op, line, col))
                i += len(op)
                col += len(op)
                matched = True
                break
        if matched:
            continue
        if ch in _PUNCT:
            tokens.append(Token(TokenKind.PUNCT, ch, line, col))
            i += 1
            col += 1
            continue
        error(f"unexpected character {ch!r}")

    tokens.append(Token(TokenKind.EOF, "", line, col))
    return tokens
