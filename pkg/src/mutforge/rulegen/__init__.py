"""
Rule-based mutation generation.

This module exports:
- RuleOperator, ALL_OPERATORS: the operator set (AOR, ROR, LOR, LVR, UOI, SDL)
- enumerate_rule_mutants: tree-based enumeration over a line span
- line_substitutions: token-level mutants of a single line
- parse_operators: operator set from config names

Example:
    >>> from mutforge.rulegen import RuleOperator, enumerate_rule_mutants
"""

from mutforge.rulegen.operators import (
    ALL_OPERATORS,
    RuleOperator,
    apply_edit,
    enumerate_rule_mutants,
    line_substitutions,
    literal_replacements,
    parse_operators,
)

__all__ = [
    "ALL_OPERATORS",
    "RuleOperator",
    "apply_edit",
    "enumerate_rule_mutants",
    "line_substitutions",
    "literal_replacements",
    "parse_operators",
]
