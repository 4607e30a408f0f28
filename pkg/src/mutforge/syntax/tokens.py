"""
Tokenizer shared by every language mutforge touches.

The lexer is C-family generic: it is exact for MiniLang and good enough for
Java-like sources, where it only feeds token-sequence comparisons (identity,
duplicate detection, BLEU, deletion detection). Comments and whitespace never
produce tokens.

Example Usage:
    >>> from mutforge.syntax.tokens import tokenize, lexemes
    >>> lexemes(tokenize("a = b + 1;"))
    ('a', '=', 'b', '+', '1', ';')
"""

import re
from dataclasses import dataclass, field
from enum import StrEnum

from mutforge.errors import LexicalError


class TokenKind(StrEnum):
    IDENTIFIER = "Identifier"
    KEYWORD = "Keyword"
    INT_LITERAL = "IntLiteral"
    BOOL_LITERAL = "BoolLiteral"
    STRING_LITERAL = "StringLiteral"
    OPERATOR = "Operator"
    PUNCT = "Punct"


KEYWORDS = frozenset({"fn", "let", "if", "else", "while", "return"})
BOOL_WORDS = frozenset({"true", "false"})

# Longest match first.
OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "->", "::", "<<", ">>",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", "?",
)
PUNCTUATION = frozenset("(){}[];,.:@")

_WORD = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER = re.compile(r"[0-9][0-9_]*[lL]?")
_SPACE = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class Token:
    """
    One lexeme.

    Position fields do not take part in equality, so token lists from
    differently formatted sources compare equal when their lexemes agree.
    """

    kind: TokenKind
    text: str
    offset: int = field(default=0, compare=False)
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


def tokenize(source: str) -> list[Token]:
    """
    Split source text into tokens.

    Args:
        source: Program text (any newline convention).

    Returns:
        Tokens in source order.

    Raises:
        LexicalError: On an unterminated string/char literal or block comment.
    """
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    length = len(source)

    while pos < length:
        ch = source[pos]

        space = _SPACE.match(source, pos)
        if space:
            chunk = space.group()
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = pos + chunk.rfind("\n") + 1
            pos = space.end()
            continue

        if source.startswith("//", pos):
            eol = source.find("\n", pos)
            pos = length if eol == -1 else eol
            continue

        if source.startswith("/*", pos):
            close = source.find("*/", pos + 2)
            if close == -1:
                raise LexicalError("unterminated block comment", line, pos - line_start + 1)
            comment = source[pos:close + 2]
            newlines = comment.count("\n")
            if newlines:
                line += newlines
                line_start = pos + comment.rfind("\n") + 1
            pos = close + 2
            continue

        column = pos - line_start + 1

        if ch in "\"'":
            end = _scan_quoted(source, pos)
            if end is None:
                raise LexicalError("unterminated string literal", line, column)
            tokens.append(Token(TokenKind.STRING_LITERAL, source[pos:end], pos, line, column))
            pos = end
            continue

        word = _WORD.match(source, pos)
        if word:
            text = word.group()
            if text in BOOL_WORDS:
                kind = TokenKind.BOOL_LITERAL
            elif text in KEYWORDS:
                kind = TokenKind.KEYWORD
            else:
                kind = TokenKind.IDENTIFIER
            tokens.append(Token(kind, text, pos, line, column))
            pos = word.end()
            continue

        number = _NUMBER.match(source, pos)
        if number:
            tokens.append(Token(TokenKind.INT_LITERAL, number.group(), pos, line, column))
            pos = number.end()
            continue

        operator = next((op for op in OPERATORS if source.startswith(op, pos)), None)
        if operator is not None:
            tokens.append(Token(TokenKind.OPERATOR, operator, pos, line, column))
            pos += len(operator)
            continue

        # Anything else (including stray characters) is punctuation; the
        # parser decides whether it is legal.
        tokens.append(Token(TokenKind.PUNCT, ch, pos, line, column))
        pos += 1

    return tokens


def _scan_quoted(source: str, start: int) -> int | None:
    quote = source[start]
    pos = start + 1
    while pos < len(source):
        ch = source[pos]
        if ch == "\\":
            pos += 2
            continue
        if ch == "\n":
            return None
        if ch == quote:
            return pos + 1
        pos += 1
    return None


def lexemes(tokens: list[Token]) -> tuple[str, ...]:
    return tuple(t.text for t in tokens)


def render(tokens: list[Token]) -> str:
    """Lexemes joined by single spaces; re-tokenizes to an equal list."""
    return " ".join(t.text for t in tokens)


def normalized(text: str) -> tuple[str, ...]:
    """
    Token-normalized form used for identity and duplicate decisions.

    Text that does not lex (e.g. an LLM answer with a dangling quote) falls
    back to its whitespace-split words so that it still compares stably.
    """
    try:
        return lexemes(tokenize(text))
    except LexicalError:
        return tuple(text.split())
