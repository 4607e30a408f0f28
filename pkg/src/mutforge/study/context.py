"""
Mutation target extraction.

The target is a window of N lines around the bug: (N-1)//2 lines before the
bug's first line, the rest after its last line, clipped to the body of the
enclosing function. The prompt context is the whole enclosing function plus
the tests that call it.

Non-MiniLang files have no tree; their window is clipped to the file and the
whole file stands in for the function.
"""

import logging
import re

from pydantic import BaseModel, ConfigDict

from mutforge.errors import LexicalError, ParseError
from mutforge.schemas.bug_case import BugCase
from mutforge.schemas.location import SourceLocation
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tree import SyntaxNode, SyntaxTree

logger = logging.getLogger(__name__)

MINILANG_SUFFIX = ".mini"


class TargetWindow(BaseModel):
    """
    Attributes:
        location: Lines to mutate (fixed version).
        target: Text of those lines.
        function_name: Name of the enclosing function, None outside MiniLang.
        enclosing_function: Source of the enclosing function.
        unit_tests: Source of the test functions calling it.
        tree: Whether a MiniLang tree backs the window.
    """

    model_config = ConfigDict(frozen=True)

    location: SourceLocation
    target: str
    function_name: str | None = None
    enclosing_function: str
    unit_tests: str | None = None
    tree: bool = False


def window_lines(bug_start: int, bug_end: int, context_length: int, lower: int, upper: int) -> tuple[int, int]:
    """Window [start, end] around the bug lines, clipped to [lower, upper]."""
    before = (context_length - 1) // 2
    after = context_length - 1 - before
    start = max(lower, bug_start - before)
    end = min(upper, bug_end + after)
    # a bug on the function header or closing brace still yields its own lines
    start = min(start, bug_start)
    end = max(end, bug_end)
    return start, end


def _parse(source: str) -> SyntaxTree | None:
    try:
        return parse_mini(source)
    except (LexicalError, ParseError):
        return None


def _body_lines(fn: SyntaxNode) -> tuple[int, int]:
    if fn.end_line - fn.line >= 2:
        return fn.line + 1, fn.end_line - 1
    return fn.line, fn.end_line


def _calling_tests(bug: BugCase, name: str) -> str | None:
    root = bug.fixed_source.tests_root
    if not root.is_dir():
        return None
    call = re.compile(rf"\b{re.escape(name)}\s*\(")
    chunks: list[str] = []
    for path in sorted(root.rglob(f"*{MINILANG_SUFFIX}")):
        source = path.read_text(encoding="utf-8").replace("\r\n", "\n")
        tree = _parse(source)
        if tree is None:
            continue
        for fn in tree.functions():
            text = tree.text_of(fn)
            if call.search(text):
                chunks.append(text)
    return "\n\n".join(chunks) or None


def extract_target(bug: BugCase, context_length: int = 3) -> TargetWindow:
    """
    Mutation target and prompt context for a bug case.

    Args:
        bug: Bug case.
        context_length: Window size in lines (1, 2 or 3).
    """
    loc = bug.bug_location
    source = bug.fixed_source.read(loc.file)
    lines = source.split("\n")
    tree = _parse(source) if loc.file.endswith(MINILANG_SUFFIX) else None
    fn = tree.function_at(loc.line_start) if tree is not None else None

    if fn is not None:
        lower, upper = _body_lines(fn)
        start, end = window_lines(loc.line_start, loc.line_end, context_length, lower, upper)
        enclosing = tree.text_of(fn)
        name = fn.label
        tests = _calling_tests(bug, name) if name else None
    else:
        start, end = window_lines(loc.line_start, loc.line_end, context_length, 1, len(lines))
        enclosing = source
        name = None
        tests = None

    window = SourceLocation(file=loc.file, line_start=start, line_end=end)
    logger.debug(
        "Target extracted",
        extra={"extra_fields": {"bug_id": bug.id, "window": str(window), "function": name}},
    )
    return TargetWindow(
        location=window,
        target="\n".join(lines[start - 1:end]),
        function_name=name,
        enclosing_function=enclosing,
        unit_tests=tests,
        tree=fn is not None,
    )
