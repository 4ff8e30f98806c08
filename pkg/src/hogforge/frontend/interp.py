"""Deterministic evaluator used to check behavior preservation.

Arithmetic wraps at 64 bits (two's complement), division truncates
toward zero, and shift counts are masked to the low six bits so every
program has exactly one defined outcome. A step budget bounds runaway
loops; the trace records how the run halted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .nodes import (
    BUILTIN_FUNCTIONS,
    Assign,
    Binary,
    Block,
    Break,
    Call,
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
    walk,
)

DEFAULT_STEP_LIMIT = 100_000

_U64 = 1 << 64
_I64_MIN = -(1 << 63)

HALT_NORMAL = "normal"
HALT_STEP_LIMIT = "step_limit"
HALT_ERROR = "error"

ERR_DIV_BY_ZERO = "div_by_zero"
ERR_ARRAY_OOB = "array_out_of_bounds"
ERR_UNDECLARED = "undeclared_name"
ERR_BAD_CALL = "unknown_function"
ERR_INPUT_EXHAUSTED = "input_exhausted_strict"


def wrap64(value: int) -> int:
    return ((value - _I64_MIN) % _U64) + _I64_MIN


@dataclass
class ExecTrace:
    outputs: list = field(default_factory=list)
    return_value: int | None = None
    steps: int = 0
    status: str = HALT_NORMAL
    error_kind: str | None = None


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _ReturnValue(Exception):
    def __init__(self, value):
        self.value = value


class _Halt(Exception):
    """Run ended abnormally; status/error_kind already set on the trace."""


class _Machine:
    def __init__(self, inputs: list, step_limit: int, strict: bool = False):
        self.inputs = list(inputs)
        self.input_pos = 0
        self.step_limit = step_limit
        self.strict = strict
        self.trace = ExecTrace()
        self.scopes = [{}]

    # -- bookkeeping ------------------------------------------------------

    def tick(self) -> None:
        self.trace.steps += 1
        if self.trace.steps > self.step_limit:
            self.trace.status = HALT_STEP_LIMIT
            raise _Halt()

    def fail(self, kind: str) -> None:
        self.trace.status = HALT_ERROR
        self.trace.error_kind = kind
        raise _Halt()

    def push_scope(self) -> None:
        self.scopes.append({})

    def pop_scope(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, value) -> None:
        self.scopes[-1][name] = value

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        self.fail(ERR_UNDECLARED)

    def store(self, name: str, value: int) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        self.fail(ERR_UNDECLARED)

    def next_input(self) -> int:
        if self.input_pos < len(self.inputs):
            value = self.inputs[self.input_pos]
            self.input_pos += 1
            return wrap64(int(value))
        if self.strict:
            self.fail(ERR_INPUT_EXHAUSTED)
        return 0

    # -- expressions ------------------------------------------------------

    def eval(self, expr) -> int:
        if isinstance(expr, IntLit):
            return wrap64(expr.value)
        if isinstance(expr, Var):
            value = self.lookup(expr.name)
            if isinstance(value, list):
                self.fail(ERR_UNDECLARED)
            return value
        if isinstance(expr, Index):
            arr = self.lookup(expr.name)
            if not isinstance(arr, list):
                self.fail(ERR_ARRAY_OOB)
            idx = self.eval(expr.index)
            if idx < 0 or idx >= len(arr):
                self.fail(ERR_ARRAY_OOB)
            return arr[idx]
        if isinstance(expr, Unary):
            if expr.op == "!":
                return 0 if self.eval(expr.operand) else 1
            value = self.eval(expr.operand)
            if expr.op == "-":
                return wrap64(-value)
            if expr.op == "~":
                return wrap64(~value)
            return value
        if isinstance(expr, Binary):
            return self.eval_binary(expr)
        if isinstance(expr, Call):
            return self.eval_call(expr)
        if isinstance(expr, StrLit):
            self.fail(ERR_BAD_CALL)
        raise TypeError(f"cannot evaluate {type(expr).__name__}")

    def eval_binary(self, expr: Binary) -> int:
        op = expr.op
        if op == "&&":
            if not self.eval(expr.left):
                return 0
            return 1 if self.eval(expr.right) else 0
        if op == "||":
            if self.eval(expr.left):
                return 1
            return 1 if self.eval(expr.right) else 0
        a = self.eval(expr.left)
        b = self.eval(expr.right)
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        if op == "/":
            if b == 0:
                self.fail(ERR_DIV_BY_ZERO)
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return wrap64(q)
        if op == "%":
            if b == 0:
                self.fail(ERR_DIV_BY_ZERO)
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return wrap64(a - q * b)
        if op == "<<":
            return wrap64(a << (b & 63))
        if op == ">>":
            return wrap64(a >> (b & 63))
        if op == "&":
            return wrap64(a & b)
        if op == "|":
            return wrap64(a | b)
        if op == "^":
            return wrap64(a ^ b)
        if op == "==":
            return 1 if a == b else 0
        if op == "!=":
            return 1 if a != b else 0
        if op == "<":
            return 1 if a < b else 0
        if op == "<=":
            return 1 if a <= b else 0
        if op == ">":
            return 1 if a > b else 0
        if op == ">=":
            return 1 if a >= b else 0
        raise ValueError(f"unknown operator {op!r}")

    def eval_call(self, expr: Call) -> int:
        name = expr.name
        if name == "input":
            if expr.args:
                self.fail(ERR_BAD_CALL)
            return self.next_input()
        if name == "print":
            for arg in expr.args:
                self.trace.outputs.append(self.eval(arg))
            return 0
        if name == "abs":
            if len(expr.args) != 1:
                self.fail(ERR_BAD_CALL)
            return wrap64(abs(self.eval(expr.args[0])))
        if name in ("min", "max"):
            if len(expr.args) < 2:
                self.fail(ERR_BAD_CALL)
            values = [self.eval(a) for a in expr.args]
            return min(values) if name == "min" else max(values)
        self.fail(ERR_BAD_CALL)

    # -- statements -------------------------------------------------------

    def exec_block(self, block: Block) -> None:
        self.push_scope()
        try:
            for stmt in block.stmts:
                self.exec(stmt)
        finally:
            self.pop_scope()

    def exec(self, stmt) -> None:
        self.tick()
        if isinstance(stmt, (Empty,)):
            return
        if isinstance(stmt, Block):
            self.exec_block(stmt)
        elif isinstance(stmt, Decl):
            for d in stmt.declarators:
                if d.array_size is not None:
                    self.declare(d.name, [0] * d.array_size)
                else:
                    self.declare(d.name, self.eval(d.init) if d.init is not None else 0)
        elif isinstance(stmt, Assign):
            value = self.eval(stmt.value)
            target = stmt.target
            if isinstance(target, Index):
                arr = self.lookup(target.name)
                if not isinstance(arr, list):
                    self.fail(ERR_ARRAY_OOB)
                idx = self.eval(target.index)
                if idx < 0 or idx >= len(arr):
                    self.fail(ERR_ARRAY_OOB)
                arr[idx] = value
            else:
                self.store(target.name, value)
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr)
        elif isinstance(stmt, If):
            if self.eval(stmt.cond):
                self.exec_block(stmt.then)
            elif stmt.orelse is not None:
                if isinstance(stmt.orelse, If):
                    self.exec(stmt.orelse)
                else:
                    self.exec_block(stmt.orelse)
        elif isinstance(stmt, While):
            while True:
                self.tick()
                if not self.eval(stmt.cond):
                    break
                try:
                    self.exec_block(stmt.body)
                except _Continue:
                    continue
                except _Break:
                    break
        elif isinstance(stmt, DoWhile):
            while True:
                try:
                    self.exec_block(stmt.body)
                except _Continue:
                    pass
                except _Break:
                    break
                self.tick()
                if not self.eval(stmt.cond):
                    break
        elif isinstance(stmt, For):
            self.push_scope()
            try:
                if stmt.init is not None:
                    self.exec(stmt.init)
                while True:
                    self.tick()
                    if stmt.cond is not None and not self.eval(stmt.cond):
                        break
                    try:
                        self.exec_block(stmt.body)
                    except _Continue:
                        pass
                    except _Break:
                        break
                    if stmt.step is not None:
                        self.exec(stmt.step)
            finally:
                self.pop_scope()
        elif isinstance(stmt, Switch):
            value = self.eval(stmt.scrutinee)
            start = None
            default = None
            for i, case in enumerate(stmt.cases):
                if case.label is None:
                    default = i
                elif case.label == value:
                    start = i
                    break
            if start is None:
                start = default
            if start is None:
                return
            self.push_scope()
            try:
                for case in stmt.cases[start:]:
                    for s in case.stmts:
                        self.exec(s)
            except _Break:
                pass
            finally:
                self.pop_scope()
        elif isinstance(stmt, Break):
            raise _Break()
        elif isinstance(stmt, Continue):
            raise _Continue()
        elif isinstance(stmt, Return):
            value = self.eval(stmt.value) if stmt.value is not None else None
            raise _ReturnValue(value)
        else:
            raise TypeError(f"cannot execute {type(stmt).__name__}")


def run_function(fn: FunctionDef, inputs: list,
                 step_limit: int = DEFAULT_STEP_LIMIT,
                 strict: bool = False) -> ExecTrace:
    """Run a single function to completion.

    Parameters bind from the front of the input vector in order; any
    remaining values feed input() calls. Both draws return 0 once the
    vector is exhausted, unless strict mode makes exhaustion an error.
    """
    machine = _Machine(inputs, step_limit, strict=strict)
    for _, pname in fn.params:
        machine.declare(pname, machine.next_input())
    try:
        machine.exec_block(fn.body)
        if fn.return_type != "void":
            machine.trace.return_value = 0
    except _ReturnValue as ret:
        machine.trace.return_value = ret.value
    except _Halt:
        pass
    except (_Break, _Continue):
        machine.trace.status = HALT_ERROR
        machine.trace.error_kind = "stray_jump"
    return machine.trace


def is_executable(fn: FunctionDef) -> bool:
    """True when every name resolves and all calls hit builtins.

    String literals are rejected too: the evaluator has no value for
    them, so units that carry format strings stay opaque.
    """
    declared = {pname for _, pname in fn.params}
    for node in walk(fn):
        if isinstance(node, Decl):
            declared.update(d.name for d in node.declarators)
    for node in walk(fn):
        if isinstance(node, StrLit):
            return False
        if isinstance(node, Call) and node.name not in BUILTIN_FUNCTIONS:
            return False
        if isinstance(node, (Var, Index)) and node.name not in declared:
            return False
    return True


def traces_equivalent(a: ExecTrace, b: ExecTrace) -> bool:
    """Behavioral equality, tolerant of step-budget differences.

    Step counts never participate: a rewrite may add or remove
    bookkeeping steps. When either run hit the step limit, equivalence
    degrades to an output-prefix check, because the budget can cut the
    same program at different points.
    """
    if a.status == HALT_STEP_LIMIT or b.status == HALT_STEP_LIMIT:
        short, long_ = (a.outputs, b.outputs) if len(a.outputs) <= len(b.outputs) \
            else (b.outputs, a.outputs)
        return long_[:len(short)] == short
    if a.status != b.status:
        return False
    if a.status == HALT_ERROR:
        return a.error_kind == b.error_kind and a.outputs == b.outputs
    return a.outputs == b.outputs and a.return_value == b.return_value
