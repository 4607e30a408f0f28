"""
Analyses over classified pools: origin nodes of non-compilable mutants,
deletion share, and equal-count subsampling.
"""

import logging
from collections import Counter
from collections.abc import Callable, Mapping, Sequence

import numpy as np

from mutforge.errors import LexicalError, MetricError, ParseError
from mutforge.schemas.mutation import MutationPool, MutationRecord, StatusKind
from mutforge.syntax.diff import is_deletion
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tokens import normalized
from mutforge.syntax.tree import NodeKind, SyntaxTree

logger = logging.getLogger(__name__)

MINILANG_SUFFIX = ".mini"


def _line_offset(source: str, line: int) -> int:
    offset = 0
    for _ in range(line - 1):
        offset = source.index("\n", offset) + 1
    return offset


def changed_span(original: str, mutated: str) -> tuple[int, int]:
    """
    Character span of ``original`` touched by the edit, relative to its start.

    Common prefix and suffix are removed; a pure insertion maps to the one
    character at the insertion point.
    """
    prefix = 0
    limit = min(len(original), len(mutated))
    while prefix < limit and original[prefix] == mutated[prefix]:
        prefix += 1
    suffix = 0
    while suffix < limit - prefix and original[-1 - suffix] == mutated[-1 - suffix]:
        suffix += 1
    start, end = prefix, len(original) - suffix
    if start == end:
        if start >= len(original):
            start = max(0, len(original) - 1)
        end = min(len(original), start + 1)
    return start, end


def origin_node(record: MutationRecord, tree: SyntaxTree) -> NodeKind:
    """Kind of the innermost fixed-source node spanning the record's edit."""
    base = _line_offset(tree.source, record.location.line_start)
    start, end = changed_span(record.original_text, record.mutated_text)
    node = tree.innermost(base + start, base + end)
    if node.kind is NodeKind.PROGRAM:
        fn = tree.function_at(record.location.line_start)
        return fn.kind if fn is not None else node.kind
    return node.kind


def _trees(records: Sequence[MutationRecord], read_fixed: Callable[[str], str]) -> dict[str, SyntaxTree | None]:
    trees: dict[str, SyntaxTree | None] = {}
    for record in records:
        file = record.location.file
        if file in trees:
            continue
        if not file.endswith(MINILANG_SUFFIX):
            trees[file] = None
            continue
        try:
            trees[file] = parse_mini(read_fixed(file))
        except (LexicalError, ParseError):
            trees[file] = None
    return trees


def origin_node_counts(pool: MutationPool, read_fixed: Callable[[str], str]) -> Counter[str]:
    """NodeKind name -> NonCompilable records whose edit it spans."""
    failed = pool.with_kind(StatusKind.NON_COMPILABLE)
    trees = _trees(failed, read_fixed)
    counts: Counter[str] = Counter()
    skipped = 0
    for record in failed:
        tree = trees[record.location.file]
        if tree is None:
            skipped += 1
            continue
        counts[origin_node(record, tree).value] += 1
    if skipped:
        logger.warning(
            "Origin nodes need a parseable MiniLang source",
            extra={"extra_fields": {"pool": pool.generator_id, "skipped": skipped}},
        )
    return counts


def shares(counts: Mapping[str, int]) -> dict[str, float]:
    """Counts as fractions of their total; empty for an empty tally."""
    total = sum(counts.values())
    if total == 0:
        return {}
    return {key: counts[key] / total for key in sorted(counts)}


def origin_node_distribution(pool: MutationPool, read_fixed: Callable[[str], str]) -> dict[str, float]:
    """
    NodeKind -> fraction of NonCompilable records originating there.

    Args:
        pool: Classified pool.
        read_fixed: File name -> fixed source text.
    """
    return shares(origin_node_counts(pool, read_fixed))


def noncompilable_deletions(pool: MutationPool) -> int:
    return sum(
        1
        for r in pool.with_kind(StatusKind.NON_COMPILABLE)
        if is_deletion(normalized(r.original_text), normalized(r.mutated_text))
    )


def equal_count_subsample(pools: Sequence[MutationPool], seed: int) -> list[MutationPool]:
    """
    Seeded uniform subsets, all the size of the smallest pool.

    Each pool keeps its record order; pool i draws from its own stream
    seeded with (seed, i).

    Raises:
        MetricError: If a pool is empty.
    """
    if not pools:
        return []
    empty = [p.generator_id for p in pools if not p.records]
    if empty:
        raise MetricError(f"cannot subsample empty pools {empty[:10]}")
    size = min(len(p.records) for p in pools)
    subsets: list[MutationPool] = []
    for index, pool in enumerate(pools):
        rng = np.random.default_rng([seed, index])
        chosen = np.sort(rng.choice(len(pool.records), size=size, replace=False))
        subsets.append(pool.replace_records([pool.records[int(i)] for i in chosen]))
    return subsets
