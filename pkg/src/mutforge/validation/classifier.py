"""
Mutation pool classification.

classify assigns exactly one status to every record, in precedence order:

    1. IdenticalToOriginal  token-normalized mutated text equals the original
    2. NonCompilable        the toolchain reported diagnostics
    3. Duplicate            token-equal to an earlier Viable record at the same location
    4. Viable

Identical and duplicate records never need compiling. A record that is
token-equal to an earlier record whose compilation failed inherits that
record's diagnostics, so Duplicate always points at a Viable record.

Example Usage:
    >>> from mutforge.validation.classifier import classify, set_counts
    >>> classified = classify(pool, {"m1": [], "m2": [diagnostic]})
    >>> total, compilable, useless, viable = set_counts(classified)
"""

import logging
from collections.abc import Mapping, Sequence

from mutforge.errors import IntegrityError
from mutforge.schemas.mutation import (
    USELESS_KINDS,
    Diagnostic,
    MutantStatus,
    MutationPool,
    MutationRecord,
    StatusKind,
)
from mutforge.syntax.tokens import normalized

logger = logging.getLogger(__name__)

CompileResults = Mapping[str, Sequence[Diagnostic]]

_LocationKey = tuple[str, int, int, tuple[str, ...]]


def _location_key(record: MutationRecord, tokens: tuple[str, ...]) -> _LocationKey:
    loc = record.location
    return (loc.file, loc.line_start, loc.line_end, tokens)


def is_identical(record: MutationRecord) -> bool:
    return normalized(record.mutated_text) == normalized(record.original_text)


def needs_compilation(pool: MutationPool) -> list[MutationRecord]:
    """
    Records that classification will need a compile result for.

    Identical records and records token-equal to an earlier candidate at the
    same location are skipped.
    """
    seen: set[_LocationKey] = set()
    pending: list[MutationRecord] = []
    for record in pool.records:
        tokens = normalized(record.mutated_text)
        if tokens == normalized(record.original_text):
            continue
        key = _location_key(record, tokens)
        if key in seen:
            continue
        seen.add(key)
        pending.append(record)
    return pending


def classify(pool: MutationPool, compile_results: CompileResults) -> MutationPool:
    """
    Assign a status to every record of the pool.

    Args:
        pool: Pool to classify (may already be classified).
        compile_results: Record id -> diagnostics; an empty sequence means the
            mutant compiled. Records without an entry fall back to the
            compile outcome their current status implies.

    Returns:
        A new pool with every record classified.

    Raises:
        IntegrityError: When compile_results names an unknown id, or a record
            that must be compiled has no result.
    """
    known_ids = {r.id for r in pool.records}
    unknown = sorted(set(compile_results) - known_ids)
    if unknown:
        raise IntegrityError(
            f"compile results reference unknown record ids {unknown[:10]}",
            pool=pool.generator_id,
        )

    viable_at: dict[_LocationKey, str] = {}
    failed_at: dict[_LocationKey, tuple[Diagnostic, ...]] = {}
    classified: list[MutationRecord] = []

    for record in pool.records:
        tokens = normalized(record.mutated_text)
        if tokens == normalized(record.original_text):
            classified.append(record.with_status(MutantStatus.identical()))
            continue

        key = _location_key(record, tokens)
        own_result = _compile_result(record, compile_results)

        if own_result is None:
            if key in viable_at:
                status = MutantStatus.duplicate(viable_at[key])
            elif key in failed_at:
                status = MutantStatus.non_compilable(failed_at[key])
            else:
                raise IntegrityError(
                    f"record '{record.id}' needs a compile result but has none",
                    pool=pool.generator_id,
                )
        elif own_result:
            status = MutantStatus.non_compilable(own_result)
            failed_at.setdefault(key, status.diagnostics)
        elif key in viable_at:
            status = MutantStatus.duplicate(viable_at[key])
        else:
            status = MutantStatus.viable()
            viable_at[key] = record.id

        if status.kind is StatusKind.VIABLE and record.status_kind is StatusKind.EQUIVALENT_LABELED:
            status = MutantStatus.equivalent_labeled()
        classified.append(record.with_status(status))

    result = pool.replace_records(classified)
    total, compilable, useless, viable = set_counts(result)
    logger.info(
        "Pool classified",
        extra={
            "extra_fields": {
                "project_id": pool.project_id,
                "generator_id": pool.generator_id,
                "total": total,
                "compilable": compilable,
                "useless": useless,
                "viable": viable,
            }
        },
    )
    return result


def _compile_result(
    record: MutationRecord, compile_results: CompileResults
) -> tuple[Diagnostic, ...] | None:
    if record.id in compile_results:
        return tuple(compile_results[record.id])
    kind = record.status_kind
    if kind is StatusKind.NON_COMPILABLE:
        return record.status.diagnostics
    if kind in (StatusKind.VIABLE, StatusKind.EQUIVALENT_LABELED):
        return ()
    return None


def set_counts(pool: MutationPool) -> tuple[int, int, int, int]:
    """
    Set sizes of a classified pool.

    Returns:
        (|A|, |C|, |U|, |C - U|)

    Raises:
        IntegrityError: If any record is unclassified.
    """
    if not pool.is_classified:
        missing = [r.id for r in pool.records if r.status is None]
        raise IntegrityError(f"pool has unclassified records {missing[:10]}", pool=pool.generator_id)

    total = len(pool.records)
    compilable = sum(1 for r in pool.records if r.status_kind is not StatusKind.NON_COMPILABLE)
    useless = sum(1 for r in pool.records if r.status_kind in USELESS_KINDS)
    return total, compilable, useless, compilable - useless
