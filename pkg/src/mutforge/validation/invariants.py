"""
Invariant checking for mutforge.

This module implements the invariants documented in docs/invariants.md.
Each check returns a bool and logs the violations it finds; nothing here
raises.

Invariants Implemented:
    - Set algebra: U subset of C subset of A, |C| = |U| + viable
    - Classification idempotency
    - Record id uniqueness
    - Duplicate references point at earlier Viable records at the same location
    - Kill matrix totality

Example Usage:
    >>> from mutforge.validation.invariants import check_set_algebra
    >>> assert check_set_algebra(classified_pool)
"""

import logging
from collections import Counter
from collections.abc import Iterable

from mutforge.schemas.execution import KillMatrix
from mutforge.schemas.mutation import (
    USELESS_KINDS,
    MutationPool,
    MutationRecord,
    StatusKind,
)
from mutforge.validation.classifier import CompileResults, classify

logger = logging.getLogger(__name__)


def check_set_algebra(pool: MutationPool) -> bool:
    """
    Check the set algebra of a classified pool.

    Verifies:
        - every record carries a status
        - U is a subset of C, C is a subset of A
        - |C| = |U| + |C - U|

    Args:
        pool: Classified pool.

    Returns:
        True if all relations hold, False otherwise.
    """
    unclassified = [r.id for r in pool.records if r.status is None]
    if unclassified:
        logger.warning(
            "Set algebra violation: unclassified records",
            extra={
                "extra_fields": {
                    "unclassified_count": len(unclassified),
                    "unclassified_ids": unclassified[:10],
                }
            },
        )
        return False

    all_ids = {r.id for r in pool.records}
    compilable = {r.id for r in pool.records if r.status_kind is not StatusKind.NON_COMPILABLE}
    useless = {r.id for r in pool.records if r.status_kind in USELESS_KINDS}
    viable = {r.id for r in pool.viable()}

    violations: list[str] = []
    if not useless <= compilable:
        violations.append("U is not a subset of C")
    if not compilable <= all_ids:
        violations.append("C is not a subset of A")
    if len(compilable) != len(useless) + len(viable):
        violations.append("|C| != |U| + viable")
    if viable & useless:
        violations.append("viable and U overlap")

    if violations:
        logger.warning(
            "Set algebra violation detected",
            extra={
                "extra_fields": {
                    "violations": violations,
                    "total": len(all_ids),
                    "compilable": len(compilable),
                    "useless": len(useless),
                    "viable": len(viable),
                }
            },
        )
        return False

    logger.debug(
        "Set algebra check passed",
        extra={"extra_fields": {"total": len(all_ids)}},
    )
    return True


def check_classification_idempotent(pool: MutationPool, compile_results: CompileResults) -> bool:
    """
    Check that classifying a classified pool again changes nothing.

    Args:
        pool: Classified pool.
        compile_results: The compile results used for the first pass.

    Returns:
        True if the second pass reproduces every status.
    """
    again = classify(pool, compile_results)
    differing = [
        first.id
        for first, second in zip(pool.records, again.records, strict=True)
        if first.status != second.status
    ]
    if differing:
        logger.warning(
            "Idempotency violation: reclassification changed statuses",
            extra={
                "extra_fields": {
                    "difference_count": len(differing),
                    "differing_ids": differing[:10],
                }
            },
        )
        return False
    return True


def check_unique_ids(records: Iterable[MutationRecord]) -> bool:
    """
    Check that record ids are unique.

    Args:
        records: Records to check (typically built with model_construct).

    Returns:
        True if no id repeats.
    """
    counts = Counter(r.id for r in records)
    duplicates = sorted(rid for rid, count in counts.items() if count > 1)
    if duplicates:
        logger.warning(
            "Uniqueness violation: duplicate record ids",
            extra={
                "extra_fields": {
                    "duplicate_count": len(duplicates),
                    "duplicate_ids": duplicates[:10],
                }
            },
        )
        return False
    return True


def check_duplicate_references(pool: MutationPool) -> bool:
    """
    Check that every Duplicate refers to an earlier Viable record at the same location.
    """
    earlier: dict[str, MutationRecord] = {}
    violations: list[dict] = []
    for record in pool.records:
        if record.status_kind is StatusKind.DUPLICATE:
            target = earlier.get(record.status.duplicate_of or "")
            if target is None:
                violations.append({"id": record.id, "reason": "target missing or later"})
            elif target.status_kind not in (StatusKind.VIABLE, StatusKind.EQUIVALENT_LABELED):
                violations.append({"id": record.id, "reason": f"target is {target.status_kind}"})
            elif target.location != record.location:
                violations.append({"id": record.id, "reason": "target at another location"})
        earlier[record.id] = record

    if violations:
        logger.warning(
            "Duplicate reference violation detected",
            extra={
                "extra_fields": {
                    "violation_count": len(violations),
                    "violations": violations[:10],
                }
            },
        )
        return False
    return True


def check_kill_matrix_total(matrix: KillMatrix) -> bool:
    """
    Check that every (mutant, test) pair and every baseline entry has a verdict.

    Args:
        matrix: Kill matrix (possibly built with model_construct).

    Returns:
        True if the matrix is total.
    """
    missing: list[dict] = []
    for test_id in matrix.test_ids:
        if test_id not in matrix.baseline:
            missing.append({"mutant": "__baseline__", "test": test_id})
    for mutant_id in matrix.mutant_ids:
        row = matrix.cells.get(mutant_id, {})
        for test_id in matrix.test_ids:
            if test_id not in row:
                missing.append({"mutant": mutant_id, "test": test_id})

    if missing:
        logger.warning(
            "Kill matrix totality violation detected",
            extra={
                "extra_fields": {
                    "missing_count": len(missing),
                    "missing": missing[:10],
                }
            },
        )
        return False
    return True
