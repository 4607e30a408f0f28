"""
Rule-based mutation operators.

Operators (Major/PIT conventions):
    AOR  arithmetic operator replacement   + - * / % -> each of the other four
    ROR  relational operator replacement   < -> <= >=, <= -> < >, > -> >= <=,
                                           >= -> > <, == <-> !=
    LOR  logical operator replacement      && <-> ||
    LVR  literal value replacement         int n -> 0, 1, n+1, n-1 (minus n itself);
                                           bool b -> !b
    UOI  unary operator insertion          x -> -x (int) or !x (bool), for the bare
                                           identifier value of a return, assignment
                                           or let whose type is known
    SDL  statement deletion                single-line assignment, expression
                                           statement or return -> ``;``

Two entry points share the tables:

- enumerate_rule_mutants works on a parsed MiniLang tree and touches exactly
  one node per mutant.
- line_substitutions works on one line of any C-family source at token level;
  the stub chat backend uses it to fake model output.
"""

import logging
from collections.abc import Iterable, Iterator
from enum import StrEnum

from mutforge.errors import LexicalError
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import MutationRecord
from mutforge.syntax.checker import MiniType, identifier_types
from mutforge.syntax.tokens import Token, TokenKind, tokenize
from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree

logger = logging.getLogger(__name__)


class RuleOperator(StrEnum):
    AOR = "AOR"
    ROR = "ROR"
    LOR = "LOR"
    LVR = "LVR"
    UOI = "UOI"
    SDL = "SDL"


ALL_OPERATORS = frozenset(RuleOperator)

AOR_TABLE: dict[str, tuple[str, ...]] = {
    "+": ("-", "*", "/", "%"),
    "-": ("+", "*", "/", "%"),
    "*": ("+", "-", "/", "%"),
    "/": ("+", "-", "*", "%"),
    "%": ("+", "-", "*", "/"),
}
ROR_TABLE: dict[str, tuple[str, ...]] = {
    "<": ("<=", ">="),
    "<=": ("<", ">"),
    ">": (">=", "<="),
    ">=": (">", "<"),
    "==": ("!=",),
    "!=": ("==",),
}
LOR_TABLE: dict[str, tuple[str, ...]] = {
    "&&": ("||",),
    "||": ("&&",),
}
SDL_KINDS = frozenset({NodeKind.ASSIGNMENT, NodeKind.EXPR_STMT, NodeKind.RETURN_STMT})
UOI_PARENTS = frozenset({NodeKind.RETURN_STMT, NodeKind.ASSIGNMENT, NodeKind.VAR_DECL})

# (start offset, end offset, replacement text)
Edit = tuple[int, int, str]


def parse_operators(names: Iterable[str]) -> frozenset[RuleOperator]:
    """Operator set from config names; raises ValueError on unknown names."""
    selected: set[RuleOperator] = set()
    for name in names:
        try:
            selected.add(RuleOperator(name.strip().upper()))
        except ValueError:
            raise ValueError(
                f"RULE_OPERATOR: unknown operator '{name}', expected one of {sorted(RuleOperator)}"
            ) from None
    return frozenset(selected)


def literal_replacements(lexeme: str) -> list[str]:
    """LVR replacement lexemes; negative values are parenthesized."""
    if lexeme in ("true", "false"):
        return ["false" if lexeme == "true" else "true"]
    value = int(lexeme)
    values: list[int] = []
    for candidate in (0, 1, value + 1, value - 1):
        if candidate != value and candidate not in values:
            values.append(candidate)
    return [str(v) if v >= 0 else f"({v})" for v in values]


def _operator_token(source: str, left: SyntaxNode, right: SyntaxNode) -> Token:
    gap = source[left.end:right.start]
    token = next(t for t in tokenize(gap) if t.kind is TokenKind.OPERATOR)
    return Token(token.kind, token.text, left.end + token.offset, token.line, token.column)


def _walk_with_parent(
    node: SyntaxNode, parent: SyntaxNode | None = None
) -> Iterator[tuple[SyntaxNode, SyntaxNode | None]]:
    yield node, parent
    for child in node.children:
        yield from _walk_with_parent(child, node)


def _sites(
    operator: RuleOperator,
    node: SyntaxNode,
    parent: SyntaxNode | None,
    source: str,
    types: dict[int, MiniType],
) -> list[Edit]:
    if operator in (RuleOperator.AOR, RuleOperator.ROR, RuleOperator.LOR):
        if node.kind is not NodeKind.BINARY_OPERATION:
            return []
        table = {RuleOperator.AOR: AOR_TABLE, RuleOperator.ROR: ROR_TABLE, RuleOperator.LOR: LOR_TABLE}[operator]
        replacements = table.get(node.label or "", ())
        if not replacements:
            return []
        token = _operator_token(source, node.children[0], node.children[1])
        return [(token.offset, token.end, r) for r in replacements]

    if operator is RuleOperator.LVR:
        if node.kind is not NodeKind.LITERAL:
            return []
        return [(node.start, node.end, r) for r in literal_replacements(node.label or "0")]

    if operator is RuleOperator.UOI:
        if node.kind is not NodeKind.IDENTIFIER or parent is None or parent.kind not in UOI_PARENTS:
            return []
        node_type = types.get(id(node))
        if node_type is None:
            return []
        sign = "-" if node_type is MiniType.INT else "!"
        return [(node.start, node.end, f"{sign}{node.label}")]

    if operator is RuleOperator.SDL:
        if node.kind not in SDL_KINDS or node.line != node.end_line:
            return []
        return [(node.start, node.end, ";")]

    return []


def _line_starts(source: str) -> list[int]:
    starts = [0]
    for index, ch in enumerate(source):
        if ch == "\n":
            starts.append(index + 1)
    return starts


def _line_of(starts: list[int], offset: int) -> int:
    low, high = 0, len(starts) - 1
    while low < high:
        mid = (low + high + 1) // 2
        if starts[mid] <= offset:
            low = mid
        else:
            high = mid - 1
    return low + 1


def apply_edit(source: str, edit: Edit, file: str) -> tuple[SourceLocation, str, str]:
    """
    Turn an offset edit into a line-based mutation.

    Returns:
        (location, original_text, mutated_text) where the texts are the full
        lines the edit touches.
    """
    start, end, replacement = edit
    starts = _line_starts(source)
    first = _line_of(starts, start)
    last = _line_of(starts, max(start, end - 1))
    span_start = starts[first - 1]
    span_end = starts[last] - 1 if last < len(starts) else len(source)
    original = source[span_start:span_end]
    mutated = source[span_start:start] + replacement + source[end:span_end]
    return SourceLocation(file=file, line_start=first, line_end=last), original, mutated


def enumerate_rule_mutants(
    tree: SyntaxTree,
    operators: Iterable[RuleOperator],
    span: SourceLocation,
    id_prefix: str = "rule",
) -> list[MutationRecord]:
    """
    Enumerate every rule mutant inside a line span.

    Order: pre-order node traversal, then operator name, then replacement order.

    Args:
        tree: Tree parsed from the fixed source (tree.source holds its text).
        operators: Operators to apply.
        span: Lines to mutate; span.file names the file in records.
        id_prefix: Prefix for record ids (``<prefix>/0001``...).

    Returns:
        Unclassified records, one per mutant.
    """
    selected = sorted(set(operators))
    if not selected:
        return []
    types = identifier_types(tree, span.file) if RuleOperator.UOI in selected else {}
    source = tree.source

    records: list[MutationRecord] = []
    for node, parent in _walk_with_parent(tree.root):
        if node.kind is NodeKind.PROGRAM:
            continue
        if node.line < span.line_start or node.end_line > span.line_end:
            continue
        for operator in selected:
            for edit in _sites(operator, node, parent, source, types):
                location, original, mutated = apply_edit(source, edit, span.file)
                records.append(
                    MutationRecord(
                        id=f"{id_prefix}/{len(records) + 1:04d}",
                        origin=f"rule:{operator}",
                        location=location,
                        original_text=original,
                        mutated_text=mutated,
                    )
                )

    logger.debug(
        "Rule mutants enumerated",
        extra={
            "extra_fields": {
                "span": str(span),
                "operators": [str(op) for op in selected],
                "mutant_count": len(records),
            }
        },
    )
    return records


_OPERAND_END = frozenset({TokenKind.IDENTIFIER, TokenKind.INT_LITERAL, TokenKind.BOOL_LITERAL})


def line_substitutions(line: str, operators: Iterable[RuleOperator] = ALL_OPERATORS) -> list[str]:
    """
    Token-level rule mutants of one source line.

    AOR only touches binary arithmetic operators (the previous token ends
    an operand), so a unary ``-`` is left alone. SDL applies to a line holding exactly
    one assignment or call statement. UOI needs type information and is not applied here.

    Returns:
        Mutated copies of the line in token order; empty when nothing applies
        or the line does not tokenize.
    """
    selected = set(operators)
    try:
        tokens = tokenize(line)
    except LexicalError:
        return []

    mutants: list[str] = []
    previous: Token | None = None
    for token in tokens:
        replacements: tuple[str, ...] | list[str] = ()
        if token.kind is TokenKind.OPERATOR:
            binary = previous is not None and (previous.kind in _OPERAND_END or previous.text == ")")
            if token.text in AOR_TABLE and binary and RuleOperator.AOR in selected:
                replacements = AOR_TABLE[token.text]
            elif token.text in ROR_TABLE and RuleOperator.ROR in selected:
                replacements = ROR_TABLE[token.text]
            elif token.text in LOR_TABLE and RuleOperator.LOR in selected:
                replacements = LOR_TABLE[token.text]
        elif token.kind in (TokenKind.INT_LITERAL, TokenKind.BOOL_LITERAL) and RuleOperator.LVR in selected:
            if token.kind is TokenKind.BOOL_LITERAL or token.text.isdigit():
                replacements = literal_replacements(token.text)
        for replacement in replacements:
            mutants.append(line[:token.offset] + replacement + line[token.end:])
        previous = token

    if RuleOperator.SDL in selected and _is_simple_statement(tokens):
        indent = line[: len(line) - len(line.lstrip())]
        mutants.append(f"{indent};")
    return mutants


def _is_simple_statement(tokens: list[Token]) -> bool:
    if len(tokens) < 2 or tokens[0].kind is not TokenKind.IDENTIFIER or tokens[-1].text != ";":
        return False
    texts = [t.text for t in tokens]
    return texts.count(";") == 1 and "{" not in texts and "}" not in texts
