"""
Experiment orchestration over the (bug x generator) grid.

For every cell: extract the target window, generate, screen compilation,
classify, execute the viable mutants and compute per-cell counts. A failing
stage marks only its own cell as failed. Aggregates, equal-count subsampling
and equivalence samples are reductions over the completed cells, keyed by
(bug, generator) so the result does not depend on scheduling.

Example Usage:
    >>> from mutforge.config import load_run_config
    >>> from mutforge.study.experiment import run_experiment
    >>> outcome = run_experiment(load_run_config(Path("config/run.example.toml")))
    >>> outcome.manifest.cells["bug-001"]["rule"].status
    'ok'
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from datetime import UTC, datetime
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from mutforge.config import ExperimentConfig, load_config
from mutforge.errors import MutforgeError
from mutforge.harness.adapters import ToolchainAdapter
from mutforge.harness.execution import build_kill_matrix, screen_records
from mutforge.harness.minilang import MiniLangAdapter
from mutforge.harness.subprocess_adapter import SubprocessAdapter
from mutforge.harness.workspace import materialize
from mutforge.llmgen.backends import ChatBackend
from mutforge.metrics.behavior import bug_behavior
from mutforge.metrics.labels import EquivalenceLabels, apply_labels, read_labels
from mutforge.metrics.syntactic import syntactic_report
from mutforge.schemas.bug_case import BugCase
from mutforge.schemas.execution import KillMatrix
from mutforge.schemas.mutation import MutationPool, StatusKind
from mutforge.study.analysis import noncompilable_deletions, origin_node_counts
from mutforge.study.context import extract_target
from mutforge.study.fixtures import discover_bug_cases, load_bug_case
from mutforge.study.generators import Generator, build_generators
from mutforge.study.taxonomy import Rule, compile_rules, error_type_counts
from mutforge.validation.classifier import classify, needs_compilation, set_counts

logger = logging.getLogger(__name__)


class CellCounts(BaseModel):
    """
    Stage counts of one (bug, generator) cell. Every reported ratio is a
    quotient of these numbers (or of their sums over cells).
    """

    model_config = ConfigDict(frozen=True)

    prompted: int = 0
    parsed: int = 0
    skipped: int = 0
    parse_failed: int = 0
    generated: int = 0
    compilable: int = 0
    useless: int = 0
    viable: int = 0
    noncompilable: int = 0
    noncompilable_deletions: int = 0
    executed: int = 0
    killed: int = 0
    coupled: int = 0
    detected: int = 0
    ochiai_sum: float = 0.0
    deletions: int = 0
    diversity_base: int = 0
    exact_matches: int = 0
    bleu_sum: float = 0.0
    bleu_count: int = 0
    ast_distance_sum: int = 0
    ast_distance_count: int = 0
    prompt_tokens: int = 0
    completion_tokens: int = 0
    error_types: dict[str, int] = Field(default_factory=dict)
    origin_nodes: dict[str, int] = Field(default_factory=dict)
    new_kinds: dict[str, int] = Field(default_factory=dict)


class CellManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: Literal["ok", "failed"]
    error: dict[str, Any] | None = None
    counts: CellCounts | None = None
    wall_time: float = 0.0


class RunManifest(BaseModel):
    """
    Attributes:
        created_at, finished_at: UTC timestamps (ISO 8601).
        config: Snapshot of the validated run configuration.
        seeds: Master seed plus the seeds derived from it.
        generators: Generator ids, grid column order.
        bugs: Bug ids, grid row order.
        cells: bug id -> generator id -> cell status and counts.
        outputs: Files written, relative to the output directory.
    """

    model_config = ConfigDict(frozen=True)

    created_at: str
    finished_at: str
    config: dict[str, Any]
    seeds: dict[str, Any]
    generators: list[str]
    bugs: list[str]
    cells: dict[str, dict[str, CellManifest]]
    outputs: list[str] = Field(default_factory=list)


class CellResult(BaseModel):
    """A completed or failed cell with the artifacts later stages need."""

    model_config = ConfigDict(frozen=True)

    bug_id: str
    generator_id: str
    manifest: CellManifest
    pool: MutationPool | None = None
    matrix: KillMatrix | None = None
    triggering: frozenset[str] = frozenset()


class ExperimentOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    manifest: RunManifest
    report: dict[str, Any]
    cells: tuple[CellResult, ...]


def create_adapter(cfg: ExperimentConfig) -> ToolchainAdapter:
    spec = cfg.adapter
    if spec.kind == "subprocess":
        return SubprocessAdapter(
            check_cmd=spec.check_cmd or "",
            test_cmd=spec.test_cmd or "",
            list_tests_cmd=spec.list_tests_cmd or "",
            pass_exit_code=spec.pass_exit_code,
            concurrent_safe=spec.concurrent_safe,
        )
    return MiniLangAdapter(max_steps=spec.max_steps)


def _error_payload(exc: Exception) -> dict[str, Any]:
    if isinstance(exc, MutforgeError):
        return exc.to_dict()
    return {"error": "INTERNAL", "message": str(exc), "type": type(exc).__name__}


def _failed(bug_id: str, generator_id: str, exc: Exception, wall_time: float = 0.0) -> CellResult:
    return CellResult(
        bug_id=bug_id,
        generator_id=generator_id,
        manifest=CellManifest(status="failed", error=_error_payload(exc), wall_time=wall_time),
    )


class _Context:
    def __init__(
        self,
        cfg: ExperimentConfig,
        adapter: ToolchainAdapter,
        rules: tuple[Rule, ...],
        labels: EquivalenceLabels | None,
        work_dir: Path | None,
    ) -> None:
        self.cfg = cfg
        self.adapter = adapter
        self.rules = rules
        self.labels = labels
        self.work_dir = work_dir


def list_bug_tests(adapter: ToolchainAdapter, bug: BugCase, work_dir: Path | None = None) -> list[str]:
    workspace = materialize(bug.fixed_source, None, work_dir)
    try:
        return adapter.list_tests(workspace)
    finally:
        workspace.remove()


def run_cell(ctx: _Context, bug: BugCase, tests: list[str], generator: Generator) -> CellResult:
    """Generate, screen, classify, execute and count one cell."""
    window = extract_target(bug, ctx.cfg.context_length)
    pool = generator.generate(bug, window)

    pending = needs_compilation(pool)
    results = screen_records(ctx.adapter, bug.fixed_source, pending, workers=ctx.cfg.workers, work_dir=ctx.work_dir)
    pool = classify(pool, results)
    if ctx.labels is not None:
        pool = apply_labels(pool, ctx.labels)

    generated, compilable, useless, viable = set_counts(pool)
    viable_records = pool.viable()
    matrix: KillMatrix | None = None
    if viable_records:
        matrix = build_kill_matrix(
            ctx.adapter,
            bug.fixed_source,
            viable_records,
            tests,
            timeout=ctx.cfg.timeout,
            work_dir=ctx.work_dir,
            multiplier=ctx.cfg.timeout_multiplier,
        )

    behavior = bug_behavior(bug.id, matrix, bug.triggering_tests)
    syntax = syntactic_report(pool, bug)
    failed = pool.with_kind(StatusKind.NON_COMPILABLE)
    bleu_values = [m.bleu for m in syntax.mutations if m.bleu is not None]
    distances = [m.ast_distance for m in syntax.mutations if m.ast_distance is not None]
    counts = CellCounts(
        prompted=len(pool.generations),
        parsed=sum(g.candidates for g in pool.generations),
        skipped=sum(g.skipped for g in pool.generations),
        parse_failed=sum(1 for g in pool.generations if g.parse_failed),
        generated=generated,
        compilable=compilable,
        useless=useless,
        viable=viable,
        noncompilable=len(failed),
        noncompilable_deletions=noncompilable_deletions(pool),
        executed=behavior.mutants,
        killed=behavior.killed,
        coupled=behavior.coupled,
        detected=int(behavior.detected),
        ochiai_sum=behavior.ochiai_sum,
        deletions=syntax.diversity.deletions,
        diversity_base=syntax.diversity.mutants,
        exact_matches=syntax.exact_matches,
        bleu_sum=math.fsum(bleu_values),
        bleu_count=len(bleu_values),
        ast_distance_sum=sum(distances),
        ast_distance_count=len(distances),
        prompt_tokens=sum(g.usage.prompt_tokens for g in pool.generations if g.usage),
        completion_tokens=sum(g.usage.completion_tokens for g in pool.generations if g.usage),
        error_types=dict(sorted(error_type_counts(failed, ctx.rules).items())),
        origin_nodes=dict(sorted(origin_node_counts(pool, bug.fixed_source.read).items())),
        new_kinds=dict(syntax.diversity.histogram),
    )
    wall_time = math.fsum(g.wall_time for g in pool.generations)
    logger.info(
        "Cell finished",
        extra={
            "extra_fields": {
                "bug_id": bug.id,
                "generator": generator.id,
                "generated": generated,
                "compilable": compilable,
                "viable": viable,
                "killed": behavior.killed,
                "coupled": behavior.coupled,
            }
        },
    )
    return CellResult(
        bug_id=bug.id,
        generator_id=generator.id,
        manifest=CellManifest(status="ok", counts=counts, wall_time=wall_time),
        pool=pool,
        matrix=matrix,
        triggering=bug.triggering_tests,
    )


def _guarded(ctx: _Context, bug: BugCase, tests: list[str], generator: Generator) -> CellResult:
    try:
        return run_cell(ctx, bug, tests, generator)
    except Exception as exc:  # one cell never aborts the grid
        logger.error(
            "Cell failed",
            extra={"extra_fields": {"bug_id": bug.id, "generator": generator.id, "error": str(exc)}},
            exc_info=not isinstance(exc, MutforgeError),
        )
        return _failed(bug.id, generator.id, exc)


def _bug_dirs(cfg: ExperimentConfig) -> list[Path]:
    if cfg.bugs:
        return [cfg.bugs_dir / bug_id for bug_id in cfg.bugs]
    return discover_bug_cases(cfg.bugs_dir)


def _now() -> str:
    return datetime.now(UTC).isoformat()


def run_experiment(
    cfg: ExperimentConfig,
    adapter: ToolchainAdapter | None = None,
    backends: dict[str, ChatBackend] | None = None,
    write: bool = True,
) -> ExperimentOutcome:
    """
    Run the full grid and emit the report bundle.

    Args:
        cfg: Validated run configuration.
        adapter: Toolchain adapter; built from cfg.adapter when None.
        backends: Backend instances by id, overriding the configured ones.
        write: Write the report bundle to cfg.out_dir.

    Returns:
        Manifest, report tree and per-cell artifacts.

    Raises:
        FixtureInvalidError: If the bug directory itself is missing.
        ConfigError: If few-shot example files cannot be read.
    """
    from mutforge.study.reporting import build_report, write_bundle

    created_at = _now()
    env = load_config()
    adapter = adapter or create_adapter(cfg)
    generators = build_generators(cfg, env["api_key"], backends)
    labels = read_labels(cfg.labels_file) if cfg.labels_file else None
    ctx = _Context(cfg, adapter, compile_rules(cfg.classifier_rules), labels, env["work_dir"])

    logger.info(
        "Experiment started",
        extra={
            "extra_fields": {
                "generators": [g.id for g in generators],
                "bugs_dir": str(cfg.bugs_dir),
                "seed": cfg.seed,
                "workers": cfg.workers,
            }
        },
    )

    bug_ids: list[str] = []
    jobs: list[tuple[BugCase, list[str], Generator]] = []
    results: list[CellResult] = []
    for path in _bug_dirs(cfg):
        bug_ids.append(path.name)
        try:
            bug = load_bug_case(path, adapter, work_dir=ctx.work_dir)
            tests = list_bug_tests(adapter, bug, ctx.work_dir)
        except Exception as exc:
            logger.error(
                "Bug case rejected",
                extra={"extra_fields": {"bug_id": path.name, "error": str(exc)}},
            )
            results.extend(_failed(path.name, g.id, exc) for g in generators)
            continue
        jobs.extend((bug, tests, g) for g in generators)

    if cfg.workers > 1 and adapter.concurrent_safe and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            results.extend(executor.map(lambda job: _guarded(ctx, *job), jobs))
    else:
        results.extend(_guarded(ctx, *job) for job in jobs)

    order = {bug_id: i for i, bug_id in enumerate(bug_ids)}
    columns = {g.id: i for i, g in enumerate(generators)}
    results.sort(key=lambda r: (order[r.bug_id], columns[r.generator_id]))

    report = build_report(cfg, [g.id for g in generators], bug_ids, results, labels)
    cells: dict[str, dict[str, CellManifest]] = {bug_id: {} for bug_id in bug_ids}
    for result in results:
        cells[result.bug_id][result.generator_id] = result.manifest
    manifest = RunManifest(
        created_at=created_at,
        finished_at=_now(),
        config=cfg.model_dump(mode="json"),
        seeds={
            "seed": cfg.seed,
            "sample": cfg.seed,
            "subsample": [cfg.seed + r for r in range(cfg.subsample_rounds)],
            "backends": {b.id: b.seed for b in cfg.backends},
        },
        generators=[g.id for g in generators],
        bugs=bug_ids,
        cells=cells,
    )
    if write:
        manifest = write_bundle(cfg.out_dir, manifest, report, results, cfg)

    failed = sum(1 for r in results if r.manifest.status == "failed")
    logger.info(
        "Experiment finished",
        extra={"extra_fields": {"cells": len(results), "failed": failed, "out_dir": str(cfg.out_dir)}},
    )
    return ExperimentOutcome(manifest=manifest, report=report, cells=tuple(results))


def merged_pool(results: list[CellResult], generator_id: str) -> MutationPool:
    """Every completed cell of one generator as a single pool."""
    records = []
    generations = []
    for result in results:
        if result.generator_id != generator_id or result.pool is None:
            continue
        records.extend(result.pool.records)
        generations.extend(result.pool.generations)
    return MutationPool(
        records=tuple(records),
        project_id="all",
        generator_id=generator_id,
        generations=tuple(generations),
    )


def sum_counts(counts: list[CellCounts]) -> CellCounts:
    """Field-wise sum; tallies merge key by key."""
    totals: dict[str, Any] = {}
    for name, info in CellCounts.model_fields.items():
        values = [getattr(c, name) for c in counts]
        if info.annotation is float:
            totals[name] = math.fsum(values)
        elif name in ("error_types", "origin_nodes", "new_kinds"):
            merged: Counter[str] = Counter()
            for value in values:
                merged.update(value)
            totals[name] = dict(sorted(merged.items()))
        else:
            totals[name] = sum(values)
    return CellCounts(**totals)
