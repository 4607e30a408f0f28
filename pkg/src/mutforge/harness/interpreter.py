"""
Tree-walking interpreter for MiniLang.

Integers are 32-bit two's complement; division and remainder truncate toward
zero. Execution is bounded by a step budget (deterministic) and a wall-clock
deadline (backstop); exhausting either raises ExecutionTimeout. Every other
runtime failure raises MiniRuntimeError.
"""

import time
from typing import Any

from mutforge.syntax.checker import BUILTIN_CONSTANTS
from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree

DEFAULT_MAX_STEPS = 100_000
DEFAULT_MAX_DEPTH = 48

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1


class MiniRuntimeError(Exception):
    """The program failed at run time (maps to a Crash verdict)."""


class ExecutionTimeout(Exception):
    """The step budget or deadline ran out (maps to a Timeout verdict)."""


class _Return(Exception):
    def __init__(self, value: Any) -> None:
        self.value = value


def wrap32(value: int) -> int:
    return ((value - INT_MIN) % 2**32) + INT_MIN


def java_div(a: int, b: int) -> int:
    if b == 0:
        raise MiniRuntimeError("division by zero")
    quotient = abs(a) // abs(b)
    return wrap32(quotient if (a < 0) == (b < 0) else -quotient)


def java_rem(a: int, b: int) -> int:
    if b == 0:
        raise MiniRuntimeError("remainder by zero")
    remainder = abs(a) % abs(b)
    return remainder if a >= 0 else -remainder


def _int_pow(a: int, b: int) -> int:
    if b < 0:
        raise MiniRuntimeError("negative exponent")
    return wrap32(pow(a, b, 2**32))


BUILTINS = {
    "math.abs": lambda a: wrap32(abs(a)),
    "math.sign": lambda a: (a > 0) - (a < 0),
    "math.min": min,
    "math.max": max,
    "math.pow": _int_pow,
}


def _is_int(value: Any) -> bool:
    return type(value) is int


def _is_bool(value: Any) -> bool:
    return type(value) is bool


class Interpreter:
    """
    Executes functions of a MiniLang program.

    Args:
        functions: Function name -> FunctionDecl node.
        max_steps: Evaluation steps allowed per top-level call.
        max_depth: Maximum call depth.
        deadline: ``time.monotonic()`` value after which execution stops.
    """

    def __init__(
        self,
        functions: dict[str, SyntaxNode],
        max_steps: int = DEFAULT_MAX_STEPS,
        max_depth: int = DEFAULT_MAX_DEPTH,
        deadline: float | None = None,
    ) -> None:
        self.functions = functions
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.deadline = deadline
        self.steps = 0
        self.depth = 0

    @classmethod
    def from_trees(cls, trees: list[SyntaxTree], **kwargs: Any) -> "Interpreter":
        functions: dict[str, SyntaxNode] = {}
        for tree in trees:
            for fn in tree.functions():
                functions.setdefault(fn.label or "", fn)
        return cls(functions, **kwargs)

    def run(self, name: str, args: tuple[Any, ...] = ()) -> Any:
        """Call a function from the top level with a fresh step budget."""
        self.steps = 0
        self.depth = 0
        try:
            return self.call(name, list(args))
        except RecursionError:
            raise MiniRuntimeError("host stack exhausted") from None

    # -- bookkeeping ---------------------------------------------------

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise ExecutionTimeout(f"step budget of {self.max_steps} exhausted")
        if self.deadline is not None and self.steps % 1024 == 0 and time.monotonic() > self.deadline:
            raise ExecutionTimeout("wall-clock deadline exceeded")

    # -- calls ---------------------------------------------------------

    def call(self, name: str, args: list[Any]) -> Any:
        if name in BUILTINS:
            if not all(_is_int(a) for a in args):
                raise MiniRuntimeError(f"{name} expects int arguments")
            try:
                return BUILTINS[name](*args)
            except TypeError:
                raise MiniRuntimeError(f"{name} called with {len(args)} argument(s)") from None

        fn = self.functions.get(name)
        if fn is None:
            raise MiniRuntimeError(f"unknown function '{name}'")
        params = fn.children[:-1]
        if len(params) != len(args):
            raise MiniRuntimeError(f"{name} expects {len(params)} argument(s), got {len(args)}")
        if self.depth >= self.max_depth:
            raise MiniRuntimeError(f"call depth limit {self.max_depth} exceeded in '{name}'")

        self.depth += 1
        try:
            frame = [{p.label: a for p, a in zip(params, args, strict=True)}]
            self.exec_block(fn.children[-1], frame)
            return None
        except _Return as ret:
            return ret.value
        finally:
            self.depth -= 1

    # -- statements ----------------------------------------------------

    def exec_block(self, block: SyntaxNode, frame: list[dict[str, Any]]) -> None:
        frame.append({})
        try:
            for statement in block.children:
                self.exec_statement(statement, frame)
        finally:
            frame.pop()

    def exec_statement(self, node: SyntaxNode, frame: list[dict[str, Any]]) -> None:
        self.tick()
        kind = node.kind
        if kind is NodeKind.EMPTY_STMT:
            return
        if kind is NodeKind.VAR_DECL:
            frame[-1][node.label] = self.eval(node.children[0], frame)
            return
        if kind is NodeKind.ASSIGNMENT:
            value = self.eval(node.children[0], frame)
            for scope in reversed(frame):
                if node.label in scope:
                    scope[node.label] = value
                    return
            raise MiniRuntimeError(f"assignment to undeclared variable '{node.label}'")
        if kind is NodeKind.EXPR_STMT:
            self.eval(node.children[0], frame)
            return
        if kind is NodeKind.RETURN_STMT:
            raise _Return(self.eval(node.children[0], frame) if node.children else None)
        if kind is NodeKind.IF_STMT:
            if self.condition(node.children[0], frame):
                self.exec_block(node.children[1], frame)
            elif len(node.children) == 3:
                otherwise = node.children[2]
                if otherwise.kind is NodeKind.IF_STMT:
                    self.exec_statement(otherwise, frame)
                else:
                    self.exec_block(otherwise, frame)
            return
        if kind is NodeKind.WHILE_STMT:
            while self.condition(node.children[0], frame):
                self.exec_block(node.children[1], frame)
                self.tick()
            return
        raise MiniRuntimeError(f"cannot execute {kind}")

    def condition(self, node: SyntaxNode, frame: list[dict[str, Any]]) -> bool:
        value = self.eval(node, frame)
        if not _is_bool(value):
            raise MiniRuntimeError("condition is not a bool")
        return value

    # -- expressions ---------------------------------------------------

    def eval(self, node: SyntaxNode, frame: list[dict[str, Any]]) -> Any:
        self.tick()
        kind = node.kind
        if kind is NodeKind.LITERAL:
            if node.label == "true":
                return True
            if node.label == "false":
                return False
            return wrap32(int(node.label or "0"))
        if kind is NodeKind.IDENTIFIER:
            for scope in reversed(frame):
                if node.label in scope:
                    return scope[node.label]
            raise MiniRuntimeError(f"undeclared variable '{node.label}'")
        if kind is NodeKind.MEMBER_REFERENCE:
            namespace, _, member = (node.label or "").partition(".")
            constants = BUILTIN_CONSTANTS.get(namespace, {})
            if member not in constants:
                raise MiniRuntimeError(f"unknown member '{node.label}'")
            return constants[member]
        if kind is NodeKind.METHOD_INVOCATION:
            args = [self.eval(a, frame) for a in node.children[0].children]
            return self.call(node.label or "", args)
        if kind is NodeKind.UNARY_OPERATION:
            operand = self.eval(node.children[0], frame)
            if node.label == "-":
                if not _is_int(operand):
                    raise MiniRuntimeError("unary '-' needs an int")
                return wrap32(-operand)
            if not _is_bool(operand):
                raise MiniRuntimeError("'!' needs a bool")
            return not operand
        if kind is NodeKind.BINARY_OPERATION:
            return self.binary(node, frame)
        raise MiniRuntimeError(f"cannot evaluate {kind}")

    def binary(self, node: SyntaxNode, frame: list[dict[str, Any]]) -> Any:
        operator = node.label
        left = self.eval(node.children[0], frame)

        if operator in ("&&", "||"):
            if not _is_bool(left):
                raise MiniRuntimeError(f"'{operator}' needs bool operands")
            if (operator == "&&" and not left) or (operator == "||" and left):
                return left
            right = self.eval(node.children[1], frame)
            if not _is_bool(right):
                raise MiniRuntimeError(f"'{operator}' needs bool operands")
            return right

        right = self.eval(node.children[1], frame)
        if operator in ("==", "!="):
            if type(left) is not type(right):
                raise MiniRuntimeError(f"cannot compare {type(left).__name__} with {type(right).__name__}")
            return (left == right) if operator == "==" else (left != right)

        if not (_is_int(left) and _is_int(right)):
            raise MiniRuntimeError(f"'{operator}' needs int operands")
        if operator == "+":
            return wrap32(left + right)
        if operator == "-":
            return wrap32(left - right)
        if operator == "*":
            return wrap32(left * right)
        if operator == "/":
            return java_div(left, right)
        if operator == "%":
            return java_rem(left, right)
        if operator == "<":
            return left < right
        if operator == "<=":
            return left <= right
        if operator == ">":
            return left > right
        if operator == ">=":
            return left >= right
        raise MiniRuntimeError(f"unknown operator '{operator}'")
