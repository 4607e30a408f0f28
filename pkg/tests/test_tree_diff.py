"""
Pytest test suite for tree differencing and deletion detection.

The edit distance is checked against an exhaustive forest edit-distance
recursion on small random trees.
"""

import random
from functools import lru_cache

import pytest

from mutforge.syntax.diff import EditType, is_deletion, new_node_kinds, tree_diff
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tokens import lexemes, tokenize
from mutforge.syntax.tree import NodeKind, SyntaxNode

KINDS = (NodeKind.BINARY_OPERATION, NodeKind.LITERAL, NodeKind.IDENTIFIER, NodeKind.RETURN_STMT)
LABELS = (None, "+", "-", "1", "x")

Forest = tuple[tuple, ...]


def random_tree(rng: random.Random, budget: int) -> SyntaxNode:
    kind = rng.choice(KINDS)
    label = rng.choice(LABELS)
    children = []
    remaining = budget - 1
    while remaining > 0 and rng.random() < 0.6:
        size = rng.randint(1, remaining)
        children.append(random_tree(rng, size))
        remaining -= children[-1].size()
    return SyntaxNode(kind=kind, label=label, children=tuple(children))


def as_forest(node: SyntaxNode) -> Forest:
    return (((node.kind, node.label), tuple(as_forest(c)[0] for c in node.children)),)


def forest_size(forest: Forest) -> int:
    return sum(1 + forest_size(children) for _, children in forest)


@lru_cache(maxsize=None)
def forest_distance(left: Forest, right: Forest) -> int:
    """Unit-cost ordered forest edit distance by the textbook recursion."""
    if not left:
        return forest_size(right)
    if not right:
        return forest_size(left)
    (v_label, v_children), w = left[-1], right[-1]
    w_label, w_children = w
    return min(
        forest_distance(left[:-1] + v_children, right) + 1,
        forest_distance(left, right[:-1] + w_children) + 1,
        forest_distance(v_children, w_children)
        + forest_distance(left[:-1], right[:-1])
        + (0 if v_label == w_label else 1),
    )


class TestTreeDiff:
    """Tests for tree_diff."""

    @pytest.mark.smoke
    def test_identical_trees(self):
        tree = parse_mini("fn f(a){ return a + 1; }")

        assert tree_diff(tree, parse_mini("fn f(a){ return a + 1; }")).distance == 0, (
            "Identical programs should have distance 0"
        )

    @pytest.mark.smoke
    def test_single_literal_update(self):
        script = tree_diff(parse_mini("fn f(){ return 1; }"), parse_mini("fn f(){ return 2; }"))

        assert script.distance == 1, f"Expected one edit, got {script.actions}"
        assert script.count(EditType.UPDATE) == 1, "The edit should be an Update"
        assert script.actions[0].new_label == "Literal:2", f"Unexpected label {script.actions[0].new_label}"

    def test_statement_deletion(self):
        before = parse_mini("fn f(a){ a = a + 1; return a; }")
        after = parse_mini("fn f(a){ ; return a; }")

        script = tree_diff(before, after)

        assert script.count(EditType.DELETE) >= 1, "Deleting a statement should delete nodes"
        assert script.distance <= before.size() + after.size(), "Distance is bounded by both sizes"

    def test_layout_does_not_matter(self):
        compact = parse_mini("fn f(){return 1;}")
        spread = parse_mini("fn f() {\n    return 1;\n}\n")

        assert tree_diff(compact, spread).distance == 0, "Positions should not take part in equality"

    @pytest.mark.slow
    def test_matches_exhaustive_distance_on_small_trees(self):
        rng = random.Random(20240611)
        for _ in range(600):
            left = random_tree(rng, rng.randint(1, 6))
            right = random_tree(rng, rng.randint(1, 6))

            expected = forest_distance(as_forest(left), as_forest(right))
            actual = tree_diff(left, right).distance

            assert actual == expected, f"{left} vs {right}: tree_diff {actual}, oracle {expected}"

    def test_distance_is_symmetric(self):
        rng = random.Random(3)
        for _ in range(200):
            left = random_tree(rng, rng.randint(1, 8))
            right = random_tree(rng, rng.randint(1, 8))

            assert tree_diff(left, right).distance == tree_diff(right, left).distance, (
                f"Distance should be symmetric for {left} and {right}"
            )

    def test_zero_only_on_equal_trees(self):
        rng = random.Random(11)
        for _ in range(300):
            left = random_tree(rng, rng.randint(1, 6))
            right = random_tree(rng, rng.randint(1, 6))

            assert (tree_diff(left, right).distance == 0) == (left == right), (
                f"Distance 0 must coincide with equality for {left} and {right}"
            )


class TestNewNodeKinds:
    """Tests for new_node_kinds."""

    @pytest.mark.smoke
    def test_identical_trees_introduce_nothing(self):
        tree = parse_mini("fn f(a, b){ return a + b; }")

        assert new_node_kinds(tree, tree) == {}, "Identical trees should introduce no kinds"

    def test_operator_flip_introduces_binary_operation(self):
        before = parse_mini("fn f(a, b){ return a + b; }")
        after = parse_mini("fn f(a, b){ return a - b; }")

        assert new_node_kinds(before, after) == {NodeKind.BINARY_OPERATION: 1}, (
            "Changing the operator should introduce one BinaryOperation"
        )

    def test_literal_replacing_identifier(self):
        before = parse_mini("fn f(x){ return x; }")
        after = parse_mini("fn f(x){ return true; }")

        assert new_node_kinds(before, after) == {NodeKind.LITERAL: 1}, "Only the Literal should be new"

    def test_random_trees_against_themselves(self):
        rng = random.Random(5)
        for _ in range(100):
            tree = random_tree(rng, rng.randint(1, 10))
            assert not new_node_kinds(tree, tree), f"{tree} introduced kinds against itself"


class TestIsDeletion:
    """Tests for token-subsequence deletion detection."""

    @pytest.mark.parametrize(
        ("original", "mutated", "expected"),
        [
            ("a = b + c ;", "", True),
            ("a = b + c ;", "a = b ;", True),
            ("a = b ;", "a = c ;", False),
            ("a = b ;", "a = b ;", False),
            ("a = b ;", "a = b + 1 ;", False),
        ],
    )
    def test_examples(self, original, mutated, expected):
        result = is_deletion(lexemes(tokenize(original)), lexemes(tokenize(mutated)))

        assert result is expected, f"is_deletion({original!r}, {mutated!r}) should be {expected}"

    def test_every_strict_subsequence_is_a_deletion(self):
        rng = random.Random(9)
        for _ in range(200):
            original = [rng.choice("abc+;") for _ in range(rng.randint(1, 8))]
            keep = sorted(rng.sample(range(len(original)), rng.randint(0, len(original) - 1)))
            mutated = [original[i] for i in keep]

            assert is_deletion(original, mutated), f"{mutated} is a strict subsequence of {original}"
