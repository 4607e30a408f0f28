"""
Generic labeled ordered syntax tree.

Trees are immutable. Equality covers kind, label and children; source
positions are carried for locating nodes but never compared.

Example Usage:
    >>> from mutforge.syntax.tree import NodeKind, SyntaxNode
    >>> leaf = SyntaxNode(NodeKind.LITERAL, "1")
    >>> SyntaxNode(NodeKind.RETURN_STMT, None, (leaf,)).size()
    2
"""

from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum


class NodeKind(StrEnum):
    """Closed node-kind taxonomy. Values are stable; reports key on them."""

    PROGRAM = "Program"
    FUNCTION_DECL = "FunctionDecl"
    BLOCK = "Block"
    IF_STMT = "IfStmt"
    WHILE_STMT = "WhileStmt"
    RETURN_STMT = "ReturnStmt"
    ASSIGNMENT = "Assignment"
    VAR_DECL = "VarDecl"
    EXPR_STMT = "ExprStmt"
    METHOD_INVOCATION = "MethodInvocation"
    MEMBER_REFERENCE = "MemberReference"
    BINARY_OPERATION = "BinaryOperation"
    UNARY_OPERATION = "UnaryOperation"
    LITERAL = "Literal"
    IDENTIFIER = "Identifier"
    ARGUMENT_LIST = "ArgumentList"
    EMPTY_STMT = "EmptyStmt"


STATEMENT_KINDS = frozenset({
    NodeKind.IF_STMT,
    NodeKind.WHILE_STMT,
    NodeKind.RETURN_STMT,
    NodeKind.ASSIGNMENT,
    NodeKind.VAR_DECL,
    NodeKind.EXPR_STMT,
    NodeKind.EMPTY_STMT,
})


@dataclass(frozen=True, slots=True)
class SyntaxNode:
    """
    One tree node.

    Attributes:
        kind: Node kind.
        label: Lexeme-derived label (operator, name, literal text) or None.
        children: Ordered children, in source order.
        start: Offset of the first character (not compared).
        end: Offset one past the last character (not compared).
        line: First source line (not compared).
        end_line: Last source line (not compared).
    """

    kind: NodeKind
    label: str | None = None
    children: tuple["SyntaxNode", ...] = ()
    start: int = field(default=0, compare=False)
    end: int = field(default=0, compare=False)
    line: int = field(default=1, compare=False)
    end_line: int = field(default=1, compare=False)

    def walk(self) -> Iterator["SyntaxNode"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def walk_with_ancestors(
        self, ancestors: tuple[NodeKind, ...] = ()
    ) -> Iterator[tuple["SyntaxNode", tuple[NodeKind, ...]]]:
        """Pre-order traversal yielding each node with the kinds above it (root first)."""
        yield self, ancestors
        below = (*ancestors, self.kind)
        for child in self.children:
            yield from child.walk_with_ancestors(below)

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def __str__(self) -> str:
        head = self.kind.value if self.label is None else f"{self.kind.value}({self.label})"
        if not self.children:
            return head
        return f"{head}[{', '.join(str(c) for c in self.children)}]"


@dataclass(frozen=True, slots=True)
class SyntaxTree:
    """A parsed program: the root node plus the text it was parsed from."""

    root: SyntaxNode
    source: str = field(default="", compare=False)

    def nodes(self) -> list[SyntaxNode]:
        return list(self.root.walk())

    def size(self) -> int:
        return self.root.size()

    def functions(self) -> list[SyntaxNode]:
        return [c for c in self.root.children if c.kind is NodeKind.FUNCTION_DECL]

    def function_at(self, line: int) -> SyntaxNode | None:
        """Function declaration whose lines include ``line``."""
        for fn in self.functions():
            if fn.line <= line <= fn.end_line:
                return fn
        return None

    def innermost(self, start: int, end: int) -> SyntaxNode:
        """Deepest node whose character span contains [start, end)."""
        best = self.root
        node = self.root
        while True:
            inner = next(
                (c for c in node.children if c.start <= start and end <= c.end),
                None,
            )
            if inner is None:
                return best
            best = node = inner

    def text_of(self, node: SyntaxNode) -> str:
        return self.source[node.start:node.end]
