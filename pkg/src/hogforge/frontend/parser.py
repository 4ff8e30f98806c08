"""Recursive-descent parser for the mini-C dialect.

The parser canonicalizes as it goes: every branch/loop body becomes a
Block (so the printer can always emit braces), and `++`, `--`, and
compound assignments desugar to plain assignments. Round-trip stability
(parse -> print -> parse yields a structurally identical AST) relies on
this canonical form.
"""

from __future__ import annotations

from .lexer import MiniCSyntaxError, Token, TokenKind, tokenize
from .nodes import (
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
    Return,
    StrLit,
    Switch,
    Unary,
    Var,
    While,
    assign_ids,
)

_COMPOUND_ASSIGN = {
    "+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%",
    "&=": "&", "|=": "|", "^=": "^", "<<=": "<<", ">>=": ">>",
}

# Binary operator precedence tiers, loosest first.
_BINARY_TIERS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^"],
    ["&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["<<", ">>"],
    ["+", "-"],
    ["*", "/", "%"],
]

_UNARY_OPS = ("-", "+", "!", "~")


class Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: str = None) -> bool:
        tok = self.peek()
        return tok.kind is kind and (text is None or tok.text == text)

    def at_type_name(self) -> bool:
        return self.peek().kind is TokenKind.KEYWORD and self.peek().text in TYPE_NAMES

    def expect(self, kind: TokenKind, text: str = None) -> Token:
        tok = self.peek()
        if tok.kind is kind and (text is None or tok.text == text):
            return self.advance()
        want = text if text is not None else kind.value
        got = tok.text if tok.text else "end of input"
        raise MiniCSyntaxError(f"unexpected {got!r}", tok.line, tok.col, repr(want))

    def error(self, message: str, expected: str = "") -> None:
        tok = self.peek()
        raise MiniCSyntaxError(message, tok.line, tok.col, expected)

    # -- entry point ------------------------------------------------------

    def parse_function(self) -> FunctionDef:
        if not self.at_type_name():
            self.error("function must start with a type name", "type name")
        return_type = self.advance().text
        name = self.expect(TokenKind.IDENTIFIER).text
        self.expect(TokenKind.PUNCT, "(")
        params = []
        if not self.at(TokenKind.PUNCT, ")"):
            while True:
                if not self.at_type_name():
                    self.error("parameter must start with a type name", "type name")
                ptype = self.advance().text
                pname = self.expect(TokenKind.IDENTIFIER).text
                params.append((ptype, pname))
                if self.at(TokenKind.PUNCT, ","):
                    self.advance()
                    continue
                break
        self.expect(TokenKind.PUNCT, ")")
        body = self.parse_block()
        self.expect(TokenKind.EOF)
        fn = FunctionDef(name=name, return_type=return_type, params=params, body=body)
        assign_ids(fn)
        return fn

    # -- statements -------------------------------------------------------

    def parse_block(self) -> Block:
        self.expect(TokenKind.PUNCT, "{")
        stmts = []
        while not self.at(TokenKind.PUNCT, "}"):
            if self.at(TokenKind.EOF):
                self.error("unterminated block", "'}'")
            stmts.append(self.parse_statement())
        self.advance()
        return Block(stmts=stmts)

    def parse_statement(self):
        tok = self.peek()
        if tok.kind is TokenKind.PUNCT and tok.text == "{":
            return self.parse_block()
        if tok.kind is TokenKind.PUNCT and tok.text == ";":
            self.advance()
            return Empty()
        if self.at_type_name():
            return self.parse_decl()
        if tok.kind is TokenKind.KEYWORD:
            kw = tok.text
            if kw == "if":
                return self.parse_if()
            if kw == "for":
                return self.parse_for()
            if kw == "while":
                return self.parse_while()
            if kw == "do":
                return self.parse_do_while()
            if kw == "switch":
                return self.parse_switch()
            if kw == "break":
                self.advance()
                self.expect(TokenKind.PUNCT, ";")
                return Break()
            if kw == "continue":
                self.advance()
                self.expect(TokenKind.PUNCT, ";")
                return Continue()
            if kw == "return":
                self.advance()
                value = None
                if not self.at(TokenKind.PUNCT, ";"):
                    value = self.parse_expr()
                self.expect(TokenKind.PUNCT, ";")
                return Return(value=value)
            self.error(f"unexpected keyword {kw!r}", "statement")
        stmt = self.parse_simple_statement()
        self.expect(TokenKind.PUNCT, ";")
        return stmt

    def parse_simple_statement(self):
        """Assignment, inc/dec, or expression — no trailing semicolon."""
        stmt = self.try_parse_assignment()
        if stmt is not None:
            return stmt
        return ExprStmt(expr=self.parse_expr())

    def try_parse_assignment(self):
        """Parse an assignment (including desugared ++/--/op=), or None."""
        if not self.at(TokenKind.IDENTIFIER):
            return None
        save = self.pos
        name_tok = self.advance()
        target = Var(name=name_tok.text)
        if self.at(TokenKind.PUNCT, "["):
            self.advance()
            index = self.parse_expr()
            self.expect(TokenKind.PUNCT, "]")
            target = Index(name=name_tok.text, index=index)

        tok = self.peek()
        if tok.kind is TokenKind.OPERATOR and tok.text == "=":
            self.advance()
            return Assign(target=target, value=self.parse_expr())
        if tok.kind is TokenKind.OPERATOR and tok.text in _COMPOUND_ASSIGN:
            op = _COMPOUND_ASSIGN[self.advance().text]
            read = self._target_as_read(target)
            return Assign(target=target, value=Binary(op=op, left=read, right=self.parse_expr()))
        if tok.kind is TokenKind.OPERATOR and tok.text in ("++", "--"):
            op = "+" if self.advance().text == "++" else "-"
            read = self._target_as_read(target)
            return Assign(target=target, value=Binary(op=op, left=read, right=IntLit(value=1)))
        self.pos = save
        return None

    @staticmethod
    def _target_as_read(target):
        if isinstance(target, Index):
            return Index(name=target.name, index=target.index)
        return Var(name=target.name)

    def parse_decl(self) -> Decl:
        type_name = self.advance().text
        declarators = []
        while True:
            name = self.expect(TokenKind.IDENTIFIER).text
            array_size = None
            init = None
            if self.at(TokenKind.PUNCT, "["):
                self.advance()
                size_tok = self.expect(TokenKind.INT_LITERAL)
                array_size = int(size_tok.text, 0)
                if array_size <= 0:
                    raise MiniCSyntaxError(
                        "array size must be positive", size_tok.line, size_tok.col)
                self.expect(TokenKind.PUNCT, "]")
            elif self.at(TokenKind.OPERATOR, "="):
                self.advance()
                init = self.parse_expr()
            declarators.append(Declarator(name=name, array_size=array_size, init=init))
            if self.at(TokenKind.PUNCT, ","):
                self.advance()
                continue
            break
        self.expect(TokenKind.PUNCT, ";")
        return Decl(type_name=type_name, declarators=declarators)

    def parse_braced_body(self) -> Block:
        """A statement in a body position, canonicalized to a Block."""
        stmt = self.parse_statement()
        if isinstance(stmt, Block):
            return stmt
        return Block(stmts=[stmt])

    def parse_if(self) -> If:
        self.advance()
        self.expect(TokenKind.PUNCT, "(")
        cond = self.parse_expr()
        self.expect(TokenKind.PUNCT, ")")
        then = self.parse_braced_body()
        orelse = None
        if self.at(TokenKind.KEYWORD, "else"):
            self.advance()
            if self.at(TokenKind.KEYWORD, "if"):
                # `else if` stays an If node: the chain shape is meaningful.
                orelse = self.parse_if()
            else:
                orelse = self.parse_braced_body()
        return If(cond=cond, then=then, orelse=orelse)

    def parse_for(self) -> For:
        self.advance()
        self.expect(TokenKind.PUNCT, "(")
        init = None
        if self.at_type_name():
            init = self.parse_decl()  # consumes the ';'
        elif self.at(TokenKind.PUNCT, ";"):
            self.advance()
        else:
            init = self.try_parse_assignment()
            if init is None:
                self.error("for-initializer must be a declaration or assignment")
            self.expect(TokenKind.PUNCT, ";")
        cond = None
        if not self.at(TokenKind.PUNCT, ";"):
            cond = self.parse_expr()
        self.expect(TokenKind.PUNCT, ";")
        step = None
        if not self.at(TokenKind.PUNCT, ")"):
            step = self.try_parse_assignment()
            if step is None:
                self.error("for-step must be an assignment")
        self.expect(TokenKind.PUNCT, ")")
        body = self.parse_braced_body()
        return For(init=init, cond=cond, step=step, body=body)

    def parse_while(self) -> While:
        self.advance()
        self.expect(TokenKind.PUNCT, "(")
        cond = self.parse_expr()
        self.expect(TokenKind.PUNCT, ")")
        body = self.parse_braced_body()
        return While(cond=cond, body=body)

    def parse_do_while(self) -> DoWhile:
        self.advance()
        body = self.parse_braced_body()
        self.expect(TokenKind.KEYWORD, "while")
        self.expect(TokenKind.PUNCT, "(")
        cond = self.parse_expr()
        self.expect(TokenKind.PUNCT, ")")
        self.expect(TokenKind.PUNCT, ";")
        return DoWhile(body=body, cond=cond)

    def parse_switch(self) -> Switch:
        self.advance()
        self.expect(TokenKind.PUNCT, "(")
        scrutinee = self.parse_expr()
        self.expect(TokenKind.PUNCT, ")")
        self.expect(TokenKind.PUNCT, "{")
        cases = []
        seen_labels = set()
        seen_default = False
        while not self.at(TokenKind.PUNCT, "}"):
            if self.at(TokenKind.KEYWORD, "case"):
                case_tok = self.advance()
                negative = False
                if self.at(TokenKind.OPERATOR, "-"):
                    self.advance()
                    negative = True
                label_tok = self.expect(TokenKind.INT_LITERAL)
                label = int(label_tok.text, 0)
                if negative:
                    label = -label
                if label in seen_labels:
                    raise MiniCSyntaxError(
                        f"duplicate case label {label}", case_tok.line, case_tok.col)
                seen_labels.add(label)
                self.expect(TokenKind.PUNCT, ":")
                cases.append(Case(label=label, stmts=self._parse_case_body()))
            elif self.at(TokenKind.KEYWORD, "default"):
                default_tok = self.advance()
                if seen_default:
                    raise MiniCSyntaxError(
                        "duplicate default case", default_tok.line, default_tok.col)
                seen_default = True
                self.expect(TokenKind.PUNCT, ":")
                cases.append(Case(label=None, stmts=self._parse_case_body()))
            else:
                self.error("expected 'case' or 'default'", "'case'")
        self.advance()
        return Switch(scrutinee=scrutinee, cases=cases)

    def _parse_case_body(self) -> list:
        stmts = []
        while not (self.at(TokenKind.KEYWORD, "case")
                   or self.at(TokenKind.KEYWORD, "default")
                   or self.at(TokenKind.PUNCT, "}")):
            if self.at(TokenKind.EOF):
                self.error("unterminated switch", "'}'")
            stmts.append(self.parse_statement())
        return stmts

    # -- expressions ------------------------------------------------------

    def parse_expr(self):
        return self._parse_binary(0)

    def _parse_binary(self, tier: int):
        if tier >= len(_BINARY_TIERS):
            return self._parse_unary()
        ops = _BINARY_TIERS[tier]
        left = self._parse_binary(tier + 1)
        while self.peek().kind is TokenKind.OPERATOR and self.peek().text in ops:
            op = self.advance().text
            right = self._parse_binary(tier + 1)
            left = Binary(op=op, left=left, right=right)
        return left

    def _parse_unary(self):
        tok = self.peek()
        if tok.kind is TokenKind.OPERATOR and tok.text in _UNARY_OPS:
            op = self.advance().text
            operand = self._parse_unary()
            if op == "-" and isinstance(operand, IntLit):
                return IntLit(value=-operand.value)
            if op == "+":
                return operand
            return Unary(op=op, operand=operand)
        return self._parse_postfix()

    def _parse_postfix(self):
        tok = self.peek()
        if tok.kind is TokenKind.INT_LITERAL:
            self.advance()
            return IntLit(value=int(tok.text, 0))
        if tok.kind is TokenKind.STRING_LITERAL:
            self.advance()
            return StrLit(text=tok.text)
        if tok.kind is TokenKind.PUNCT and tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(TokenKind.PUNCT, ")")
            return expr
        if tok.kind is TokenKind.IDENTIFIER:
            self.advance()
            if self.at(TokenKind.PUNCT, "("):
                self.advance()
                args = []
                if not self.at(TokenKind.PUNCT, ")"):
                    while True:
                        args.append(self.parse_expr())
                        if self.at(TokenKind.PUNCT, ","):
                            self.advance()
                            continue
                        break
                self.expect(TokenKind.PUNCT, ")")
                return Call(name=tok.text, args=args)
            if self.at(TokenKind.PUNCT, "["):
                self.advance()
                index = self.parse_expr()
                self.expect(TokenKind.PUNCT, "]")
                return Index(name=tok.text, index=index)
            return Var(name=tok.text)
        self.error(f"unexpected {tok.text!r} in expression", "expression")


def parse_function_text(source: str) -> FunctionDef:
    return Parser(tokenize(source)).parse_function()
