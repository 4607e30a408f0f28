"""
Static checker for MiniLang programs.

The checker plays the role a compiler plays for real targets: a program with
no diagnostics "compiles". Diagnostic kinds:

    lex-error, parse-error        source does not tokenize / parse
    duplicate-declaration         function, parameter or variable declared twice
    unknown-variable              use of or assignment to an undeclared variable
    unknown-function              call to an undefined function
    unknown-namespace             ``ns.x`` where ns is not a builtin namespace
    unknown-member                ``ns.x`` where x is not a member of ns
    arity                         call with the wrong number of arguments
    type-error                    int/bool discipline violated
    inconsistent-return           returns of different types, or value and bare returns mixed
    missing-return                a value-returning function can complete without returning
    unreachable-code              statement after one that never completes normally

Typing is gradual: parameters and results of user functions have unknown
type, and unknown types never produce a type-error. Within one function an
unknown-typed name used only as an int operand (or only as a bool operand or
condition) gets that type recorded for its uses in ``Checker.types``.
"""

import logging
from dataclasses import dataclass, field
from enum import StrEnum

from mutforge.errors import LexicalError, ParseError
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import Diagnostic
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree

logger = logging.getLogger(__name__)


class MiniType(StrEnum):
    INT = "int"
    BOOL = "bool"


# namespace -> function -> arity; all builtins take and return int
BUILTIN_FUNCTIONS: dict[str, dict[str, int]] = {
    "math": {"abs": 1, "min": 2, "max": 2, "sign": 1, "pow": 2},
}
BUILTIN_CONSTANTS: dict[str, dict[str, int]] = {
    "limits": {"max_int": 2**31 - 1, "min_int": -(2**31)},
}
NAMESPACES = frozenset(BUILTIN_FUNCTIONS) | frozenset(BUILTIN_CONSTANTS)

ARITHMETIC = frozenset({"+", "-", "*", "/", "%"})
RELATIONAL = frozenset({"<", "<=", ">", ">="})
EQUALITY = frozenset({"==", "!="})
LOGICAL = frozenset({"&&", "||"})


@dataclass
class _FunctionState:
    name: str
    file: str
    returns: list[tuple[SyntaxNode, MiniType | None, bool]] = field(default_factory=list)


class Checker:
    """
    Checks a set of MiniLang files that together form one program.

    Attributes:
        diagnostics: Problems found, in file then source order.
        types: Identifier node -> inferred type, for every identifier use
               whose type is known (consumed by the UOI rule operator).
    """

    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []
        self.types: dict[int, MiniType] = {}
        self._functions: dict[str, int] = {}
        self._value_calls: set[str] = set()
        self._states: list[tuple[_FunctionState, SyntaxNode, bool]] = []
        self._unknown_uses: list[SyntaxNode] = []
        self._hints: dict[str, set[MiniType]] = {}

    def check_files(self, files: dict[str, str]) -> list[Diagnostic]:
        trees: dict[str, SyntaxTree] = {}
        for file in sorted(files):
            tree = self._parse(file, files[file])
            if tree is not None:
                trees[file] = tree
        if len(trees) != len(files):
            return self.diagnostics
        self._check_trees(trees)
        return self.diagnostics

    def check_tree(self, tree: SyntaxTree, file: str) -> list[Diagnostic]:
        """Check an already-parsed single-file program."""
        self._check_trees({file: tree})
        return self.diagnostics

    def _check_trees(self, trees: dict[str, SyntaxTree]) -> None:
        for file, tree in trees.items():
            for fn in tree.functions():
                if fn.label in self._functions:
                    self._report("duplicate-declaration", f"function '{fn.label}' is already defined", file, fn)
                    continue
                self._functions[fn.label] = len(fn.children) - 1
        for file, tree in trees.items():
            for fn in tree.functions():
                self._check_function(fn, file)
        self._check_returns()

    # -- helpers -------------------------------------------------------

    def _parse(self, file: str, source: str) -> SyntaxTree | None:
        try:
            return parse_mini(source)
        except LexicalError as exc:
            self._report_at("lex-error", exc.detail, file, exc.line)
        except ParseError as exc:
            self._report_at("parse-error", exc.detail, file, exc.line)
        return None

    def _report(self, kind: str, message: str, file: str, node: SyntaxNode) -> None:
        self._report_at(kind, message, file, node.line)

    def _report_at(self, kind: str, message: str, file: str, line: int) -> None:
        location = SourceLocation(file=file, line_start=line, line_end=line)
        self.diagnostics.append(
            Diagnostic(kind=kind, message=f"{file}:{line}: {message}", location=location)
        )

    # -- functions -----------------------------------------------------

    def _check_function(self, fn: SyntaxNode, file: str) -> None:
        state = _FunctionState(name=fn.label or "", file=file)
        self._unknown_uses = []
        self._hints = {}
        scope: list[dict[str, MiniType | None]] = [{}]
        for param in fn.children[:-1]:
            if param.label in scope[0]:
                self._report("duplicate-declaration", f"parameter '{param.label}' is already declared", file, param)
            scope[0][param.label] = None

        body = fn.children[-1]
        completes = self._check_block(body, scope, state)
        self._states.append((state, body, completes))
        self._apply_hints()

        valued = [r for r in state.returns if r[2]]
        bare = [r for r in state.returns if not r[2]]
        if valued and bare:
            self._report(
                "inconsistent-return",
                f"function '{state.name}' mixes value returns and bare returns",
                file,
                bare[0][0],
            )
        first_known = next((t for _, t, _ in valued if t is not None), None)
        offender = next((node for node, t, _ in valued if t is not None and t != first_known), None)
        if offender is not None:
            self._report(
                "inconsistent-return",
                f"function '{state.name}' returns both int and bool",
                file,
                offender,
            )

    def _hint(self, node: SyntaxNode, expected: MiniType) -> None:
        if node.kind is NodeKind.IDENTIFIER and id(node) not in self.types:
            self._hints.setdefault(node.label or "", set()).add(expected)

    def _apply_hints(self) -> None:
        for node in self._unknown_uses:
            hinted = self._hints.get(node.label or "", set())
            if len(hinted) == 1:
                self.types[id(node)] = next(iter(hinted))

    def _check_returns(self) -> None:
        # A function must produce a value when it returns one anywhere, when a
        # caller uses its result, or when it is a test.
        for state, body, completes in self._states:
            valued = any(r[2] for r in state.returns)
            needs_value = valued or state.name in self._value_calls or state.name.startswith("test_")
            if needs_value and completes:
                self._report_at(
                    "missing-return",
                    f"function '{state.name}' can reach its end without returning a value",
                    state.file,
                    body.end_line,
                )

    def _check_block(
        self,
        block: SyntaxNode,
        scope: list[dict[str, MiniType | None]],
        state: _FunctionState,
    ) -> bool:
        """Check statements; returns True when the block can complete normally."""
        scope.append({})
        completes = True
        for statement in block.children:
            if not completes:
                self._report("unreachable-code", "statement is unreachable", state.file, statement)
                break
            completes = self._check_statement(statement, scope, state)
        scope.pop()
        return completes

    def _check_statement(
        self,
        node: SyntaxNode,
        scope: list[dict[str, MiniType | None]],
        state: _FunctionState,
    ) -> bool:
        kind = node.kind
        file = state.file

        if kind is NodeKind.EMPTY_STMT:
            return True

        if kind is NodeKind.VAR_DECL:
            value_type = self._expression(node.children[0], scope, file)
            if _lookup(scope, node.label) is not _MISSING:
                self._report("duplicate-declaration", f"variable '{node.label}' is already declared", file, node)
            scope[-1][node.label] = value_type
            return True

        if kind is NodeKind.ASSIGNMENT:
            value_type = self._expression(node.children[0], scope, file)
            declared = _lookup(scope, node.label)
            if declared is _MISSING:
                self._report("unknown-variable", f"cannot find symbol '{node.label}'", file, node)
            elif declared is not None and value_type is not None and declared != value_type:
                self._report(
                    "type-error",
                    f"incompatible types: {value_type} cannot be assigned to {declared} '{node.label}'",
                    file,
                    node,
                )
            return True

        if kind is NodeKind.EXPR_STMT:
            self._expression(node.children[0], scope, file, value=False)
            return True

        if kind is NodeKind.RETURN_STMT:
            if node.children:
                state.returns.append((node, self._expression(node.children[0], scope, file), True))
            else:
                state.returns.append((node, None, False))
            return False

        if kind is NodeKind.IF_STMT:
            self._condition(node.children[0], scope, file)
            then_completes = self._check_block(node.children[1], scope, state)
            if len(node.children) == 2:
                return True
            otherwise = node.children[2]
            if otherwise.kind is NodeKind.IF_STMT:
                else_completes = self._check_statement(otherwise, scope, state)
            else:
                else_completes = self._check_block(otherwise, scope, state)
            return then_completes or else_completes

        if kind is NodeKind.WHILE_STMT:
            condition = node.children[0]
            self._condition(condition, scope, file)
            self._check_block(node.children[1], scope, state)
            # A constant-true loop has no exit (there is no break).
            return not (condition.kind is NodeKind.LITERAL and condition.label == "true")

        raise AssertionError(f"unexpected statement kind {kind}")

    def _condition(self, node: SyntaxNode, scope: list[dict[str, MiniType | None]], file: str) -> None:
        condition_type = self._expression(node, scope, file)
        self._hint(node, MiniType.BOOL)
        if condition_type is MiniType.INT:
            self._report("type-error", "incompatible types: int cannot be converted to bool", file, node)

    # -- expressions ---------------------------------------------------

    def _expression(
        self,
        node: SyntaxNode,
        scope: list[dict[str, MiniType | None]],
        file: str,
        value: bool = True,
    ) -> MiniType | None:
        kind = node.kind

        if kind is NodeKind.LITERAL:
            if node.label in ("true", "false"):
                return MiniType.BOOL
            if int(node.label or "0") > 2**31:
                self._report("type-error", f"integer number too large: {node.label}", file, node)
            return MiniType.INT

        if kind is NodeKind.IDENTIFIER:
            declared = _lookup(scope, node.label)
            if declared is _MISSING:
                self._report("unknown-variable", f"cannot find symbol '{node.label}'", file, node)
                return None
            if declared is not None:
                self.types[id(node)] = declared
            else:
                self._unknown_uses.append(node)
            return declared

        if kind is NodeKind.MEMBER_REFERENCE:
            namespace, _, member = (node.label or "").partition(".")
            if _lookup(scope, namespace) is not _MISSING:
                self._report("unknown-member", f"int has no member '{member}'", file, node)
                return None
            if namespace not in NAMESPACES:
                self._report("unknown-namespace", f"cannot find namespace '{namespace}'", file, node)
                return None
            if member not in BUILTIN_CONSTANTS.get(namespace, {}):
                self._report("unknown-member", f"namespace '{namespace}' has no member '{member}'", file, node)
                return None
            return MiniType.INT

        if kind is NodeKind.METHOD_INVOCATION:
            if value:
                self._value_calls.add(node.label or "")
            arguments = node.children[0].children
            for argument in arguments:
                arg_type = self._expression(argument, scope, file)
                if "." in (node.label or "") and arg_type is MiniType.BOOL:
                    self._report(
                        "type-error",
                        f"incompatible types: bool cannot be passed to '{node.label}'",
                        file,
                        argument,
                    )
            return self._call(node, len(arguments), scope, file)

        if kind is NodeKind.UNARY_OPERATION:
            operand = self._expression(node.children[0], scope, file)
            expected = MiniType.INT if node.label == "-" else MiniType.BOOL
            self._hint(node.children[0], expected)
            if operand is not None and operand != expected:
                self._report(
                    "type-error",
                    f"bad operand type {operand} for unary operator '{node.label}'",
                    file,
                    node,
                )
            return expected

        if kind is NodeKind.BINARY_OPERATION:
            left = self._expression(node.children[0], scope, file)
            right = self._expression(node.children[1], scope, file)
            operator = node.label or ""
            if operator in EQUALITY:
                if left is not None and right is not None and left != right:
                    self._report(
                        "type-error",
                        f"incomparable types: {left} and {right}",
                        file,
                        node,
                    )
                return MiniType.BOOL
            expected = MiniType.BOOL if operator in LOGICAL else MiniType.INT
            for child in node.children:
                self._hint(child, expected)
            for operand in (left, right):
                if operand is not None and operand != expected:
                    self._report(
                        "type-error",
                        f"bad operand types for binary operator '{operator}'",
                        file,
                        node,
                    )
                    break
            if operator in ARITHMETIC:
                return MiniType.INT
            return MiniType.BOOL

        raise AssertionError(f"unexpected expression kind {kind}")

    def _call(
        self,
        node: SyntaxNode,
        argument_count: int,
        scope: list[dict[str, MiniType | None]],
        file: str,
    ) -> MiniType | None:
        name = node.label or ""
        if "." in name:
            namespace, _, member = name.partition(".")
            if _lookup(scope, namespace) is not _MISSING:
                self._report("unknown-member", f"int has no method '{member}'", file, node)
                return None
            if namespace not in NAMESPACES:
                self._report("unknown-namespace", f"cannot find namespace '{namespace}'", file, node)
                return None
            functions = BUILTIN_FUNCTIONS.get(namespace, {})
            if member not in functions:
                self._report("unknown-function", f"cannot find symbol: method {name}", file, node)
                return None
            arity = functions[member]
            result: MiniType | None = MiniType.INT
        else:
            if name not in self._functions:
                self._report("unknown-function", f"cannot find symbol: method {name}", file, node)
                return None
            arity = self._functions[name]
            result = None
        if arity != argument_count:
            self._report(
                "arity",
                f"method {name} expects {arity} argument(s) but {argument_count} given",
                file,
                node,
            )
        return result


_MISSING = object()


def _lookup(scope: list[dict[str, MiniType | None]], name: str | None) -> object:
    for frame in reversed(scope):
        if name in frame:
            return frame[name]
    return _MISSING


def check_program(files: dict[str, str]) -> list[Diagnostic]:
    """
    Check a program spread over several files.

    Args:
        files: Relative path -> source text.

    Returns:
        Diagnostics; empty when the program compiles.
    """
    diagnostics = Checker().check_files(files)
    if diagnostics:
        logger.debug(
            "MiniLang check failed",
            extra={
                "extra_fields": {
                    "diagnostic_count": len(diagnostics),
                    "kinds": sorted({d.kind for d in diagnostics})[:10],
                }
            },
        )
    return diagnostics


def check_source(source: str, file: str = "main.mini") -> list[Diagnostic]:
    return check_program({file: source})


def identifier_types(tree: SyntaxTree, file: str = "main.mini") -> dict[int, MiniType]:
    """Known types of identifier uses in a parsed program, keyed by ``id(node)``."""
    checker = Checker()
    checker.check_tree(tree, file)
    return checker.types
