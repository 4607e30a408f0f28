"""
Syntactic metrics: BLEU, AST distance, node diversity and exact matches.

BLEU compares the mutated program with the buggy program inside the bug's
line window. The window is shifted when a mutation changes the line count
before or inside it; on the buggy side its end moves by the file's line
count difference.

AST distance is the tree edit distance between the function enclosing the
mutation and the same-named function of the buggy program. It needs
MiniLang sources; other targets report token metrics only.

Diversity counts deletions (mutated tokens a strict subsequence of the
original tokens) and, for the other mutants, the node kinds they introduce.
"""

import logging
import math
from collections import Counter
from collections.abc import Callable, Sequence

from pydantic import BaseModel, ConfigDict

from mutforge.errors import LexicalError, MetricError, ParseError, StaleSourceError
from mutforge.harness.workspace import apply_to_text
from mutforge.schemas.bug_case import BugCase
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import MutationPool, MutationRecord
from mutforge.syntax.diff import is_deletion, new_node_kinds, tree_diff
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tokens import normalized
from mutforge.syntax.tree import SyntaxTree

logger = logging.getLogger(__name__)

MAX_ORDER = 4
MINILANG_SUFFIX = ".mini"


def _ngrams(tokens: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """
    Sentence BLEU with up to 4-gram clipped precisions, no smoothing.

    Orders above the candidate length are left out; any zero precision gives 0.

    Raises:
        MetricError: If the reference is empty.
    """
    if not reference:
        raise MetricError("BLEU needs a non-empty reference")
    if not candidate:
        return 0.0
    orders = min(MAX_ORDER, len(candidate))
    log_total = 0.0
    for n in range(1, orders + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        if matches == 0:
            return 0.0
        log_total += math.log(matches / (len(candidate) - n + 1))
    brevity = 1.0 if len(candidate) >= len(reference) else math.exp(1 - len(reference) / len(candidate))
    return brevity * math.exp(log_total / orders)


def _lines(text: str) -> list[str]:
    return text.split("\n")


def shifted_window(window: SourceLocation, record: MutationRecord) -> tuple[int, int]:
    """Bug window lines in the mutated file."""
    if record.location.file != window.file:
        return window.line_start, window.line_end
    delta = len(_lines(record.mutated_text)) - record.location.line_count
    start = window.line_start + delta if record.location.line_end < window.line_start else window.line_start
    end = window.line_end + delta if record.location.line_start <= window.line_end else window.line_end
    return start, end


def _slice(text: str, start: int, end: int) -> str:
    return "\n".join(_lines(text)[start - 1:end])


class KindShare(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    count: int
    share: float


class DiversityReport(BaseModel):
    """
    Attributes:
        mutants: Viable mutants considered.
        deletions: Deletion mutants among them.
        deletion_ratio: deletions / mutants (None when there are none).
        histogram: Node kind -> introductions by non-deletion mutants.
        top_kinds: Most frequent kinds with their share of the histogram.
        unparseable: Non-deletion mutants whose trees could not be built.
    """

    model_config = ConfigDict(frozen=True)

    mutants: int
    deletions: int
    deletion_ratio: float | None
    histogram: dict[str, int]
    top_kinds: tuple[KindShare, ...]
    unparseable: int


class MutationSyntax(BaseModel):
    model_config = ConfigDict(frozen=True)

    mutant_id: str
    bleu: float | None
    ast_distance: int | None


class SyntacticReport(BaseModel):
    """
    Attributes:
        mutations: Per-mutant BLEU and AST distance.
        bleu_mean: Mean BLEU over mutants with a defined score.
        ast_distance_mean: Mean AST distance over mutants with a tree pair.
        diversity: Deletion ratio and node-kind histogram.
        exact_matches: Mutants reproducing the buggy file.
    """

    model_config = ConfigDict(frozen=True)

    mutations: tuple[MutationSyntax, ...]
    bleu_mean: float | None
    ast_distance_mean: float | None
    diversity: DiversityReport
    exact_matches: int


def _parse(source: str, file: str) -> SyntaxTree | None:
    if not file.endswith(MINILANG_SUFFIX):
        return None
    try:
        return parse_mini(source)
    except (LexicalError, ParseError):
        return None


def mutated_source(record: MutationRecord, read_fixed: Callable[[str], str]) -> str | None:
    try:
        return apply_to_text(read_fixed(record.location.file), record)
    except (StaleSourceError, OSError) as exc:
        logger.warning(
            "Mutant does not apply to the fixed source",
            extra={"extra_fields": {"mutant_id": record.id, "error": str(exc)}},
        )
        return None


def top_kinds(histogram: Counter[str], k: int = 3) -> tuple[KindShare, ...]:
    total = sum(histogram.values())
    ranked = sorted(histogram.items(), key=lambda item: (-item[1], item[0]))[:k]
    return tuple(KindShare(kind=kind, count=count, share=count / total) for kind, count in ranked)


def diversity(
    records: Sequence[MutationRecord],
    read_fixed: Callable[[str], str],
    k: int = 3,
) -> DiversityReport:
    """
    Deletion ratio and introduced node kinds.

    Args:
        records: Viable mutants (identical and duplicate records contribute nothing).
        read_fixed: File name -> fixed source text.
        k: Size of the top-kind table.
    """
    deletions = 0
    unparseable = 0
    histogram: Counter[str] = Counter()
    trees: dict[str, SyntaxTree | None] = {}
    for record in records:
        if is_deletion(normalized(record.original_text), normalized(record.mutated_text)):
            deletions += 1
            continue
        file = record.location.file
        if file not in trees:
            trees[file] = _parse(read_fixed(file), file)
        mutated = mutated_source(record, read_fixed)
        before = trees[file]
        after = _parse(mutated, file) if mutated is not None else None
        if before is None or after is None:
            unparseable += 1
            continue
        histogram.update(kind.value for kind in new_node_kinds(before, after).elements())
    return DiversityReport(
        mutants=len(records),
        deletions=deletions,
        deletion_ratio=deletions / len(records) if records else None,
        histogram=dict(sorted(histogram.items())),
        top_kinds=top_kinds(histogram, k),
        unparseable=unparseable,
    )


def exact_match_count(pool: MutationPool, bug: BugCase) -> int:
    """Viable mutants whose mutated file is token-equal to the buggy file."""
    file = bug.bug_location.file
    buggy = normalized(bug.buggy_source.read(file))
    count = 0
    for record in pool.viable():
        if record.location.file != file:
            continue
        mutated = mutated_source(record, bug.fixed_source.read)
        if mutated is not None and normalized(mutated) == buggy:
            count += 1
    return count


def _mean(values: Sequence[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def syntactic_report(pool: MutationPool, bug: BugCase, k: int = 3) -> SyntacticReport:
    """BLEU, AST distance, diversity and exact matches of a pool's viable mutants."""
    window = bug.bug_location
    fixed_text = bug.fixed_source.read(window.file)
    buggy_text = bug.buggy_source.read(window.file)
    end = window.line_end + len(_lines(buggy_text)) - len(_lines(fixed_text))
    reference = normalized(_slice(buggy_text, window.line_start, end)) if end >= window.line_start else ()
    buggy_tree = _parse(buggy_text, window.file)
    buggy_functions = {fn.label: fn for fn in buggy_tree.functions()} if buggy_tree else {}

    rows: list[MutationSyntax] = []
    viable = pool.viable()
    for record in viable:
        mutated = mutated_source(record, bug.fixed_source.read)
        score: float | None = None
        distance: int | None = None
        if mutated is not None:
            if record.location.file == window.file:
                start, stop = shifted_window(window, record)
                candidate = normalized(_slice(mutated, start, stop))
            else:
                candidate = normalized(_slice(fixed_text, window.line_start, window.line_end))
            score = bleu(candidate, reference) if reference else None

            if record.location.file == window.file and buggy_functions:
                tree = _parse(mutated, window.file)
                fn = tree.function_at(record.location.line_start) if tree else None
                if fn is not None and fn.label in buggy_functions:
                    distance = tree_diff(fn, buggy_functions[fn.label]).distance
        rows.append(MutationSyntax(mutant_id=record.id, bleu=score, ast_distance=distance))

    return SyntacticReport(
        mutations=tuple(rows),
        bleu_mean=_mean([r.bleu for r in rows if r.bleu is not None]),
        ast_distance_mean=_mean([float(r.ast_distance) for r in rows if r.ast_distance is not None]),
        diversity=diversity(viable, bug.fixed_source.read, k),
        exact_matches=exact_match_count(pool, bug),
    )
