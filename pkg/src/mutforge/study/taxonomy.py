"""
Compile-error taxonomy.

classify_compile_error maps a non-compilable mutant's diagnostics to one
ErrorType. Rules are tried in order, each against every diagnostic; the
first rule that matches any diagnostic wins. Configured rules come first,
then the MiniLang kind table, then message patterns for javac-style output.
Anything left is Unclassified.
"""

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from enum import StrEnum

from mutforge.schemas.mutation import Diagnostic, MutationRecord


class ErrorType(StrEnum):
    UNKNOWN_METHOD = "UnknownMethod"
    STRUCTURAL_DESTRUCTION = "StructuralDestruction"
    INCORRECT_METHOD_PARAMETERS = "IncorrectMethodParameters"
    UNKNOWN_VARIABLE = "UnknownVariable"
    UNKNOWN_TYPE = "UnknownType"
    TYPE_MISMATCH = "TypeMismatch"
    INCORRECT_INITIALIZATION = "IncorrectInitialization"
    INCORRECT_LOCATION = "IncorrectLocation"
    INCORRECT_EXCEPTIONS = "IncorrectExceptions"
    UNCLASSIFIED = "Unclassified"


# (field, pattern, type); patterns on ``kind`` are anchored.
Rule = tuple[str, re.Pattern[str], ErrorType]


def _kind(name: str, error_type: ErrorType) -> Rule:
    return "kind", re.compile(rf"^{re.escape(name)}$"), error_type


def _message(pattern: str, error_type: ErrorType) -> Rule:
    return "message", re.compile(pattern), error_type


BUILTIN_RULES: tuple[Rule, ...] = (
    _kind("unknown-function", ErrorType.UNKNOWN_METHOD),
    _kind("parse-error", ErrorType.STRUCTURAL_DESTRUCTION),
    _kind("lex-error", ErrorType.STRUCTURAL_DESTRUCTION),
    _kind("missing-return", ErrorType.STRUCTURAL_DESTRUCTION),
    _kind("arity", ErrorType.INCORRECT_METHOD_PARAMETERS),
    _kind("unknown-variable", ErrorType.UNKNOWN_VARIABLE),
    _kind("unknown-member", ErrorType.UNKNOWN_VARIABLE),
    _kind("unknown-namespace", ErrorType.UNKNOWN_TYPE),
    _kind("type-error", ErrorType.TYPE_MISMATCH),
    _kind("inconsistent-return", ErrorType.TYPE_MISMATCH),
    _kind("duplicate-declaration", ErrorType.INCORRECT_INITIALIZATION),
    _kind("unreachable-code", ErrorType.INCORRECT_LOCATION),
    _message(r"cannot find symbol[\s\S]*symbol:\s+method", ErrorType.UNKNOWN_METHOD),
    _message(r"cannot find symbol[\s\S]*symbol:\s+class", ErrorType.UNKNOWN_TYPE),
    _message(r"cannot find symbol", ErrorType.UNKNOWN_VARIABLE),
    _message(r"cannot be applied to|actual and formal argument lists differ", ErrorType.INCORRECT_METHOD_PARAMETERS),
    _message(r"incompatible types|bad operand type", ErrorType.TYPE_MISMATCH),
    _message(r"might not have been initialized|already defined", ErrorType.INCORRECT_INITIALIZATION),
    _message(r"unreported exception|exception .* is never thrown", ErrorType.INCORRECT_EXCEPTIONS),
    _message(r"unreachable statement|missing return statement", ErrorType.INCORRECT_LOCATION),
    _message(r"expected|illegal start of|reached end of file|not a statement", ErrorType.STRUCTURAL_DESTRUCTION),
)


def compile_rules(configured: Iterable[object] = ()) -> tuple[Rule, ...]:
    """
    Configured rules (objects with ``field``, ``pattern`` and ``error_type``)
    followed by the built-in ones.
    """
    custom = tuple(
        (rule.field, re.compile(rule.pattern), ErrorType(rule.error_type))  # type: ignore[attr-defined]
        for rule in configured
    )
    return custom + BUILTIN_RULES


def classify_compile_error(diagnostics: Sequence[Diagnostic], rules: Sequence[Rule] = BUILTIN_RULES) -> ErrorType:
    """First matching rule wins; Unclassified when nothing matches."""
    for field, pattern, error_type in rules:
        for diagnostic in diagnostics:
            value = diagnostic.kind if field == "kind" else diagnostic.message
            if pattern.search(value):
                return error_type
    return ErrorType.UNCLASSIFIED


def error_type_counts(records: Iterable[MutationRecord], rules: Sequence[Rule] = BUILTIN_RULES) -> Counter[str]:
    """ErrorType name -> number of NonCompilable records."""
    counts: Counter[str] = Counter()
    for record in records:
        if record.status is None or not record.status.diagnostics:
            continue
        counts[classify_compile_error(record.status.diagnostics, rules).value] += 1
    return counts
