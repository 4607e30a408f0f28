"""
Compilation screening, test execution and kill-matrix construction.

Mutant jobs are independent: each one materializes its own workspace, runs
the adapter and removes the workspace. Results are assembled by mutant id,
so serial and parallel runs produce the same matrix.

Example Usage:
    >>> from mutforge.harness import MiniLangAdapter, build_kill_matrix, mutation_score
    >>> matrix = build_kill_matrix(MiniLangAdapter(), project, viable, tests)
    >>> mutation_score(matrix)
    0.75
"""

import csv
import logging
import os
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TypeVar

from mutforge.errors import FlakyBaselineError, IntegrityError, MetricError
from mutforge.harness.adapters import ToolchainAdapter
from mutforge.harness.workspace import Workspace, materialize
from mutforge.schemas.bug_case import ProjectSnapshot
from mutforge.schemas.execution import KillMatrix, TestOutcome, Verdict
from mutforge.schemas.mutation import Diagnostic, MutationRecord

logger = logging.getLogger(__name__)

BASELINE_ROW = "__baseline__"
TIMEOUT_MULTIPLIER = 10.0
MIN_TIMEOUT = 1.0

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    return os.cpu_count() or 1


def _map(adapter: ToolchainAdapter, fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    if workers <= 1 or not adapter.concurrent_safe or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def screen_compile(
    adapter: ToolchainAdapter,
    workspaces: Mapping[str, Workspace],
    workers: int = 1,
) -> dict[str, list[Diagnostic]]:
    """
    Check every workspace.

    Returns:
        Record id -> diagnostics (empty = compiles). Total over ``workspaces``.
        An adapter exception becomes a single ``toolchain-crash`` diagnostic.
    """
    ids = list(workspaces)

    def check_one(record_id: str) -> list[Diagnostic]:
        try:
            return list(adapter.check(workspaces[record_id]))
        except Exception as exc:
            logger.warning(
                "Toolchain crashed during check",
                extra={"extra_fields": {"record_id": record_id, "error": str(exc)}},
            )
            return [Diagnostic(kind="toolchain-crash", message=f"{type(exc).__name__}: {exc}")]

    results = dict(zip(ids, _map(adapter, check_one, ids, workers), strict=True))
    failed = sum(1 for diags in results.values() if diags)
    logger.info(
        "Compilation screening finished",
        extra={"extra_fields": {"checked": len(ids), "failed": failed, "adapter": adapter.name}},
    )
    return results


def screen_records(
    adapter: ToolchainAdapter,
    project: ProjectSnapshot,
    records: Iterable[MutationRecord],
    workers: int = 1,
    work_dir: Path | None = None,
) -> dict[str, list[Diagnostic]]:
    """Materialize, check and clean up one workspace per record."""
    records = list(records)

    def check_one(record: MutationRecord) -> list[Diagnostic]:
        workspace = materialize(project, record, work_dir)
        try:
            return screen_compile(adapter, {record.id: workspace})[record.id]
        finally:
            workspace.remove()

    return dict(zip((r.id for r in records), _map(adapter, check_one, records, workers), strict=True))


def baseline_timeouts(
    outcomes: Sequence[TestOutcome], multiplier: float = TIMEOUT_MULTIPLIER
) -> dict[str, float]:
    """Per-test timeout: max(1 s, multiplier x baseline wall time)."""
    return {o.test_id: max(MIN_TIMEOUT, multiplier * o.wall_time) for o in outcomes}


def run_baseline(
    adapter: ToolchainAdapter,
    project: ProjectSnapshot,
    tests: Sequence[str],
    work_dir: Path | None = None,
    timeout: float | None = None,
) -> list[TestOutcome]:
    """
    Run all tests twice on the unmutated project.

    Raises:
        FlakyBaselineError: If a test's verdict differs between the two runs.
    """
    workspace = materialize(project, None, work_dir)
    try:
        limit = timeout if timeout is not None else 60.0
        first = adapter.run_tests(workspace, tests, limit)
        second = adapter.run_tests(workspace, tests, limit)
    finally:
        workspace.remove()

    for a, b in zip(first, second, strict=True):
        if a.verdict != b.verdict:
            raise FlakyBaselineError(
                f"test '{a.test_id}' gave {a.verdict.name} then {b.verdict.name} on the unmutated project",
                test_id=a.test_id,
            )
    return [a if a.wall_time >= b.wall_time else b for a, b in zip(first, second, strict=True)]


def build_kill_matrix(
    adapter: ToolchainAdapter,
    project: ProjectSnapshot,
    viable: Sequence[MutationRecord],
    tests: Sequence[str],
    timeout: float | None = None,
    workers: int = 1,
    work_dir: Path | None = None,
    multiplier: float = TIMEOUT_MULTIPLIER,
) -> KillMatrix:
    """
    Run every test against every viable mutant.

    Tests that fail on the unmutated project are excluded from killing sets:
    their cells are NotRun and a warning names them.

    Args:
        adapter: Toolchain adapter.
        project: Unmutated project.
        viable: Mutants to execute (C - U).
        tests: Test ids to schedule.
        timeout: Per-test timeout in seconds; default max(1, multiplier x baseline time).
        workers: Concurrent mutant jobs (honoured only for concurrent-safe adapters).
        work_dir: Parent directory for workspaces.
        multiplier: Baseline wall-time multiplier for the default timeout.

    Raises:
        FlakyBaselineError: If a baseline test is not deterministic.
        IntegrityError: If mutant ids repeat.
    """
    ids = [r.id for r in viable]
    if len(set(ids)) != len(ids):
        raise IntegrityError("viable mutants have repeated ids")

    baseline_outcomes = run_baseline(adapter, project, tests, work_dir, timeout)
    baseline = {o.test_id: o.verdict for o in baseline_outcomes}
    signal_tests = [t for t in tests if baseline[t] is Verdict.PASS]
    excluded = [t for t in tests if baseline[t] is not Verdict.PASS]
    if excluded:
        logger.warning(
            "Tests failing on the unmutated project are excluded",
            extra={"extra_fields": {"excluded": excluded[:10], "excluded_count": len(excluded)}},
        )
    timeouts: float | dict[str, float] = (
        timeout if timeout is not None else baseline_timeouts(baseline_outcomes, multiplier)
    )

    def run_one(record: MutationRecord) -> dict[str, Verdict]:
        row = {t: Verdict.NOT_RUN for t in excluded}
        if not signal_tests:
            return row
        workspace = materialize(project, record, work_dir)
        try:
            outcomes = adapter.run_tests(workspace, signal_tests, timeouts)
        finally:
            workspace.remove()
        row.update({o.test_id: o.verdict for o in outcomes})
        return row

    rows = _map(adapter, run_one, list(viable), workers)
    matrix = KillMatrix(
        mutant_ids=tuple(ids),
        test_ids=tuple(tests),
        cells=dict(zip(ids, rows, strict=True)),
        baseline=baseline,
    )
    killed = sum(1 for m in ids if matrix.is_killed(m))
    logger.info(
        "Kill matrix built",
        extra={
            "extra_fields": {
                "mutants": len(ids),
                "tests": len(tests),
                "signal_tests": len(signal_tests),
                "killed": killed,
            }
        },
    )
    return matrix


def mutation_score(matrix: KillMatrix) -> float:
    """
    Killed mutants over all mutants of the matrix.

    Raises:
        MetricError: If the matrix has no mutants.
    """
    if not matrix.mutant_ids:
        raise MetricError("mutation score is undefined for an empty kill matrix")
    killed = sum(1 for m in matrix.mutant_ids if matrix.is_killed(m))
    return killed / len(matrix.mutant_ids)


def write_kill_matrix_csv(matrix: KillMatrix, path: Path) -> None:
    """
    Export as CSV: header ``mutant_id,<test ids...>``, a ``__baseline__`` row,
    then one row per mutant; cells are P, F, T, C or N.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["mutant_id", *matrix.test_ids])
        writer.writerow([BASELINE_ROW, *(matrix.baseline[t].value for t in matrix.test_ids)])
        for mutant_id in matrix.mutant_ids:
            row = matrix.cells[mutant_id]
            writer.writerow([mutant_id, *(row[t].value for t in matrix.test_ids)])


def read_kill_matrix_csv(path: Path) -> KillMatrix:
    """Inverse of write_kill_matrix_csv."""
    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0][:1] != ["mutant_id"]:
        raise IntegrityError(f"{path} is not a kill-matrix CSV")
    test_ids = tuple(rows[0][1:])
    baseline: dict[str, Verdict] | None = None
    cells: dict[str, dict[str, Verdict]] = {}
    order: list[str] = []
    for row in rows[1:]:
        if not row:
            continue
        verdicts = {t: Verdict(v) for t, v in zip(test_ids, row[1:], strict=True)}
        if row[0] == BASELINE_ROW:
            baseline = verdicts
        else:
            order.append(row[0])
            cells[row[0]] = verdicts
    if baseline is None:
        raise IntegrityError(f"{path} has no {BASELINE_ROW} row")
    return KillMatrix(mutant_ids=tuple(order), test_ids=test_ids, cells=cells, baseline=baseline)
