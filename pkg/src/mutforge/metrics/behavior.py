"""
Behavior metrics against real bugs.

For a mutant M with killing tests K and a bug B with triggering tests T:

    coupled(M, B)  <=>  K & T non-empty
    Ochiai(M, B)    =   |K & T| / sqrt(|K| * |T|)   (0 when either set is empty)
    CPR             =   coupled mutants / |C - U|
    RBD             =   bugs with at least one coupled mutant / bugs

Micro averages pool every mutant of every bug; macro averages take the
per-bug mean first.
"""

import math
from collections.abc import Mapping, Sequence
from statistics import fmean

from pydantic import BaseModel, ConfigDict

from mutforge.errors import MetricError
from mutforge.schemas.execution import KillMatrix


def ochiai(killing: frozenset[str] | set[str], triggering: frozenset[str] | set[str]) -> float:
    if not killing or not triggering:
        return 0.0
    return len(killing & triggering) / math.sqrt(len(killing) * len(triggering))


def is_coupled(killing: frozenset[str] | set[str], triggering: frozenset[str] | set[str]) -> bool:
    return bool(killing & triggering)


def coupling_rate(matrix: KillMatrix, triggering: frozenset[str]) -> float:
    """
    Coupled mutants over all mutants of the matrix (the viable set).

    Raises:
        MetricError: If the matrix has no mutants.
    """
    if not matrix.mutant_ids:
        raise MetricError("coupling rate is undefined without viable mutants")
    coupled = sum(1 for m in matrix.mutant_ids if is_coupled(matrix.killing_tests(m), triggering))
    return coupled / len(matrix.mutant_ids)


def mean_ochiai(matrix: KillMatrix, triggering: frozenset[str]) -> float:
    if not matrix.mutant_ids:
        raise MetricError("mean Ochiai is undefined without viable mutants")
    return fmean(ochiai(matrix.killing_tests(m), triggering) for m in matrix.mutant_ids)


def is_detected(matrix: KillMatrix | None, triggering: frozenset[str]) -> bool:
    if matrix is None:
        return False
    return any(is_coupled(matrix.killing_tests(m), triggering) for m in matrix.mutant_ids)


def real_bug_detectability(
    triggering: Mapping[str, frozenset[str]],
    matrices: Mapping[str, KillMatrix | None],
) -> float:
    """
    Fraction of bugs with at least one coupled mutant.

    Args:
        triggering: bug id -> triggering tests, one entry per bug considered.
        matrices: bug id -> kill matrix of that bug's viable mutants
            (missing or None: no viable mutant, so not detected).

    Raises:
        MetricError: If no bug is given.
    """
    if not triggering:
        raise MetricError("real bug detectability is undefined for an empty bug list")
    detected = sum(1 for bug_id, tests in triggering.items() if is_detected(matrices.get(bug_id), tests))
    return detected / len(triggering)


class BugBehavior(BaseModel):
    """Per-bug detail row."""

    model_config = ConfigDict(frozen=True)

    bug_id: str
    mutants: int
    killed: int
    coupled: int
    ochiai_sum: float
    detected: bool

    @property
    def coupling_rate(self) -> float | None:
        return self.coupled / self.mutants if self.mutants else None

    @property
    def mean_ochiai(self) -> float | None:
        return self.ochiai_sum / self.mutants if self.mutants else None


class BehaviorReport(BaseModel):
    """
    Attributes:
        rbd: Real bug detectability.
        cpr_micro, cpr_macro: Coupling rate, pooled over mutants / averaged over bugs.
        ochiai_micro, ochiai_macro: Mean Ochiai, pooled / averaged over bugs.
        mutation_score: Killed over executed mutants, pooled.
        bugs: Detail rows.
    """

    model_config = ConfigDict(frozen=True)

    rbd: float
    cpr_micro: float | None
    cpr_macro: float | None
    ochiai_micro: float | None
    ochiai_macro: float | None
    mutation_score: float | None
    bugs: tuple[BugBehavior, ...]


def bug_behavior(bug_id: str, matrix: KillMatrix | None, triggering: frozenset[str]) -> BugBehavior:
    if matrix is None or not matrix.mutant_ids:
        return BugBehavior(bug_id=bug_id, mutants=0, killed=0, coupled=0, ochiai_sum=0.0, detected=False)
    killing = [matrix.killing_tests(m) for m in matrix.mutant_ids]
    coupled = sum(1 for k in killing if is_coupled(k, triggering))
    return BugBehavior(
        bug_id=bug_id,
        mutants=len(killing),
        killed=sum(1 for k in killing if k),
        coupled=coupled,
        ochiai_sum=math.fsum(ochiai(k, triggering) for k in killing),
        detected=coupled > 0,
    )


def behavior_report(
    triggering: Mapping[str, frozenset[str]],
    matrices: Mapping[str, KillMatrix | None],
) -> BehaviorReport:
    """
    All behavior metrics over a set of bugs.

    Raises:
        MetricError: If no bug is given.
    """
    rows = [bug_behavior(bug_id, matrices.get(bug_id), tests) for bug_id, tests in sorted(triggering.items())]
    rbd = real_bug_detectability(triggering, matrices)
    with_mutants = [r for r in rows if r.mutants]
    total = sum(r.mutants for r in with_mutants)
    return BehaviorReport(
        rbd=rbd,
        cpr_micro=sum(r.coupled for r in with_mutants) / total if total else None,
        cpr_macro=_mean([r.coupling_rate for r in with_mutants]),
        ochiai_micro=math.fsum(r.ochiai_sum for r in with_mutants) / total if total else None,
        ochiai_macro=_mean([r.mean_ochiai for r in with_mutants]),
        mutation_score=sum(r.killed for r in with_mutants) / total if total else None,
        bugs=tuple(rows),
    )


def _mean(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return fmean(present) if present else None
