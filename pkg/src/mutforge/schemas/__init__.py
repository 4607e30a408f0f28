"""
Core domain schemas for mutforge.

This module exports the types shared by every stage of the pipeline:
- SourceLocation: line span inside a project file
- Diagnostic, MutantStatus, StatusKind: classification results
- MutationRecord, MutationPool, GenerationSummary, TokenUsage: generated mutations
- Verdict, TestOutcome, KillMatrix: test execution results
- ProjectSnapshot, BugCase: seeded real bugs

Example:
    >>> from mutforge.schemas import MutationPool, MutationRecord, SourceLocation
"""

from mutforge.schemas.bug_case import BugCase, ProjectSnapshot
from mutforge.schemas.execution import KILLING_VERDICTS, KillMatrix, TestOutcome, Verdict
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import (
    USELESS_KINDS,
    VIABLE_KINDS,
    Diagnostic,
    GenerationSummary,
    MutantStatus,
    MutationPool,
    MutationRecord,
    StatusKind,
    TokenUsage,
)

__all__ = [
    "BugCase",
    "Diagnostic",
    "GenerationSummary",
    "KILLING_VERDICTS",
    "KillMatrix",
    "MutantStatus",
    "MutationPool",
    "MutationRecord",
    "ProjectSnapshot",
    "SourceLocation",
    "StatusKind",
    "TestOutcome",
    "TokenUsage",
    "USELESS_KINDS",
    "VIABLE_KINDS",
    "Verdict",
]
