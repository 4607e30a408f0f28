"""
Tree differencing and node-introduction analysis.

tree_diff computes an optimal ordered tree edit script with the Zhang-Shasha
algorithm (``zss``) under unit costs: inserting or deleting a node costs 1,
relabeling costs 1 when kind or label differ and 0 otherwise. Move is part of
the action vocabulary for scripts produced by other differs; this algorithm
never emits it.

Example Usage:
    >>> from mutforge.syntax.parser import parse_mini
    >>> from mutforge.syntax.diff import tree_diff, new_node_kinds
    >>> a = parse_mini("fn f(){ return 1; }")
    >>> b = parse_mini("fn f(){ return 2; }")
    >>> tree_diff(a, b).distance
    1
"""

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import zss

from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree


class EditType(StrEnum):
    INSERT = "Insert"
    DELETE = "Delete"
    UPDATE = "Update"
    MOVE = "Move"


@dataclass(frozen=True, slots=True)
class EditAction:
    """
    One edit.

    Attributes:
        type: Insert, Delete, Update or Move.
        node: The node acted on (the before-node for Delete/Update, the after-node for Insert).
        new_label: ``kind:label`` of the replacement node (Update only).
    """

    type: EditType
    node: SyntaxNode
    new_label: str | None = None


@dataclass(frozen=True, slots=True)
class EditScript:
    actions: tuple[EditAction, ...] = ()

    @property
    def distance(self) -> int:
        return len(self.actions)

    def count(self, edit_type: EditType) -> int:
        return sum(1 for a in self.actions if a.type is edit_type)


def _root(tree: SyntaxTree | SyntaxNode) -> SyntaxNode:
    return tree.root if isinstance(tree, SyntaxTree) else tree


def _children(node: SyntaxNode) -> list[SyntaxNode]:
    return list(node.children)


def _unit(_: SyntaxNode) -> int:
    return 1


def _relabel(a: SyntaxNode, b: SyntaxNode) -> int:
    return 0 if (a.kind, a.label) == (b.kind, b.label) else 1


def _describe(node: SyntaxNode) -> str:
    return node.kind.value if node.label is None else f"{node.kind.value}:{node.label}"


def tree_diff(before: SyntaxTree | SyntaxNode, after: SyntaxTree | SyntaxNode) -> EditScript:
    """
    Minimal edit script turning ``before`` into ``after``.

    Properties:
        - distance(t, t) == 0, and 0 only for equal trees
        - distance(a, b) == distance(b, a)
        - distance(a, b) <= size(a) + size(b)
    """
    left = _root(before)
    right = _root(after)
    if left == right:
        return EditScript()

    _, operations = zss.distance(
        left,
        right,
        _children,
        insert_cost=_unit,
        remove_cost=_unit,
        update_cost=_relabel,
        return_operations=True,
    )

    actions: list[EditAction] = []
    for op in operations:
        if op.type == zss.Operation.remove:
            actions.append(EditAction(EditType.DELETE, op.arg1))
        elif op.type == zss.Operation.insert:
            actions.append(EditAction(EditType.INSERT, op.arg2))
        elif op.type == zss.Operation.update and _relabel(op.arg1, op.arg2):
            actions.append(EditAction(EditType.UPDATE, op.arg1, _describe(op.arg2)))
    return EditScript(actions=tuple(actions))


NodeKey = tuple[NodeKind, str | None, tuple[NodeKind, ...]]


def node_keys(tree: SyntaxTree | SyntaxNode) -> Counter[NodeKey]:
    """Multiset of (kind, label, ancestor kinds) over every node."""
    return Counter(
        (node.kind, node.label, ancestors)
        for node, ancestors in _root(tree).walk_with_ancestors()
    )


def new_node_kinds(before: SyntaxTree | SyntaxNode, after: SyntaxTree | SyntaxNode) -> Counter[NodeKind]:
    """
    Kinds of nodes in ``after`` whose (kind, label, parent path) never occurs in ``before``.

    Returns an empty multiset for identical trees.
    """
    existing = set(node_keys(before))
    return Counter(
        node.kind
        for node, ancestors in _root(after).walk_with_ancestors()
        if (node.kind, node.label, ancestors) not in existing
    )


def is_deletion(original_tokens: Sequence[object], mutated_tokens: Sequence[object]) -> bool:
    """
    True when ``mutated_tokens`` is a strict subsequence of ``original_tokens``.

    The empty sequence counts; equal sequences and any added token do not.
    """
    if len(mutated_tokens) >= len(original_tokens):
        return False
    remaining = iter(original_tokens)
    return all(any(token == candidate for candidate in remaining) for token in mutated_tokens)
