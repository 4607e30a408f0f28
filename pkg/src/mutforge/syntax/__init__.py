"""
Syntax substrate for mutforge.

This module exports:
- tokenize, Token, TokenKind, normalized: generic C-family lexing
- SyntaxTree, SyntaxNode, NodeKind: the generic tree model
- parse_mini: MiniLang parser
- check_program, check_source: MiniLang static checker
- tree_diff, EditScript, new_node_kinds, is_deletion: tree comparison

Example:
    >>> from mutforge.syntax import parse_mini, tree_diff
"""

from importlib import resources

from mutforge.syntax.checker import check_program, check_source, identifier_types
from mutforge.syntax.diff import (
    EditAction,
    EditScript,
    EditType,
    is_deletion,
    new_node_kinds,
    node_keys,
    tree_diff,
)
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tokens import Token, TokenKind, lexemes, normalized, render, tokenize
from mutforge.syntax.tree import NodeKind, SyntaxNode, SyntaxTree


def grammar_text() -> str:
    """The bundled MiniLang grammar."""
    return resources.files(__package__).joinpath("grammar.txt").read_text(encoding="utf-8")


__all__ = [
    "EditAction",
    "EditScript",
    "EditType",
    "NodeKind",
    "SyntaxNode",
    "SyntaxTree",
    "Token",
    "TokenKind",
    "check_program",
    "check_source",
    "grammar_text",
    "identifier_types",
    "is_deletion",
    "lexemes",
    "new_node_kinds",
    "node_keys",
    "normalized",
    "parse_mini",
    "render",
    "tokenize",
    "tree_diff",
]
