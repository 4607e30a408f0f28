"""
Classification and validation for mutforge.

This module exports:
- classify, set_counts: mutation pool classification and set sizes
- Invariant checking functions for pools and kill matrices
- ReportValidator: arithmetic closure of emitted reports against the run manifest

Example:
    >>> from mutforge.validation import classify, set_counts
    >>> from mutforge.validation import check_set_algebra, ReportValidator
"""

from mutforge.validation.classifier import classify, is_identical, needs_compilation, set_counts
from mutforge.validation.contracts import ReportValidator
from mutforge.validation.invariants import (
    check_classification_idempotent,
    check_duplicate_references,
    check_kill_matrix_total,
    check_set_algebra,
    check_unique_ids,
)

__all__ = [
    "ReportValidator",
    "check_classification_idempotent",
    "check_duplicate_references",
    "check_kill_matrix_total",
    "check_set_algebra",
    "check_unique_ids",
    "classify",
    "is_identical",
    "needs_compilation",
    "set_counts",
]
