"""
Command-line entry point.

Subcommands mirror the pipeline stages so evaluation can be re-run without
regenerating:

    generate    run generators for one bug case, write pool JSON
    filter      classify a pool (compile screening), rewrite pool JSON
    execute     build the kill matrix of a pool's viable mutants, write CSV
    metrics     compute every report from pool + bug case (+ matrix, labels)
    sample      write an equivalence-labeling CSV skeleton
    experiment  full grid per run configuration
    compare     side-by-side table and similarity of existing reports

Exit codes: 0 when every requested output was written, 1 on a mutforge
error, 2 on a usage error or an unexpected internal failure. An internal
failure always writes an ``INTERNAL`` JSON error line to stderr.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from mutforge.config import ExperimentConfig, load_config, load_run_config
from mutforge.errors import CostError, IntegrityError, MetricError, MutforgeError
from mutforge.harness.execution import build_kill_matrix, read_kill_matrix_csv, screen_records, write_kill_matrix_csv
from mutforge.llmgen.cost import cost_of
from mutforge.logging_config import setup_logging
from mutforge.metrics.behavior import bug_behavior
from mutforge.metrics.labels import apply_labels, read_labels, write_label_skeleton
from mutforge.metrics.sampling import SamplingPlan
from mutforge.metrics.syntactic import syntactic_report
from mutforge.metrics.usability import usability
from mutforge.schemas.bug_case import BugCase
from mutforge.schemas.mutation import MutationPool, StatusKind
from mutforge.study.analysis import noncompilable_deletions, origin_node_distribution, shares
from mutforge.study.context import extract_target
from mutforge.study.experiment import create_adapter, list_bug_tests, run_experiment
from mutforge.study.fixtures import load_bug_case
from mutforge.study.generators import build_generators
from mutforge.study.reporting import NOT_COMPUTED, compare_reports, load_report, render_comparison
from mutforge.study.taxonomy import compile_rules, error_type_counts
from mutforge.validation.classifier import classify, needs_compilation
from mutforge.validation.contracts import ReportValidator

logger = logging.getLogger(__name__)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Run configuration (TOML or JSON)")
    common.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    common.add_argument("--workers", type=int, help="Concurrent jobs (overrides the config)")
    common.add_argument("--out-dir", type=Path, help="Output directory (overrides the config)")
    common.add_argument("--verbose", action="store_true", help="Debug logs and JSON errors on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mutforge", description="Mutation generation and evaluation against real bugs")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", parents=[common], help="Generate a pool for one bug case")
    generate.add_argument("--bug", required=True, help="Bug case directory or id under bugs_dir")
    generate.add_argument("--generator", action="append", help="Generator id (repeatable; default all)")
    generate.add_argument("--no-validate", action="store_true", help="Skip running the triggering tests")

    filter_ = sub.add_parser("filter", parents=[common], help="Classify a pool")
    filter_.add_argument("--bug", required=True)
    filter_.add_argument("--pool", type=Path, required=True, help="Pool JSON")
    filter_.add_argument("--output", type=Path, help="Classified pool (default: rewrite --pool)")

    execute = sub.add_parser("execute", parents=[common], help="Build a kill matrix")
    execute.add_argument("--bug", required=True)
    execute.add_argument("--pool", type=Path, required=True, help="Classified pool JSON")
    execute.add_argument("--output", type=Path, help="Kill-matrix CSV")

    metrics = sub.add_parser("metrics", parents=[common], help="Compute metric reports")
    metrics.add_argument("--bug", required=True)
    metrics.add_argument("--pool", type=Path, required=True, help="Classified pool JSON")
    metrics.add_argument("--matrix", type=Path, help="Kill-matrix CSV (behavior is skipped without it)")
    metrics.add_argument("--labels", type=Path, help="Completed equivalence labels CSV")
    metrics.add_argument("--output", type=Path, help="Report JSON (default: stdout)")

    sample = sub.add_parser("sample", parents=[common], help="Equivalence sample skeleton")
    sample.add_argument("--pool", type=Path, required=True, help="Pool JSON")
    sample.add_argument("--confidence", type=float, default=0.95, choices=[0.90, 0.95, 0.99])
    sample.add_argument("--margin", type=float, default=0.05)
    sample.add_argument("--annotators", default="", help="Comma-separated annotator names")
    sample.add_argument("--output", type=Path, help="Sample CSV")

    sub.add_parser("experiment", parents=[common], help="Run the full grid")

    compare = sub.add_parser("compare", parents=[common], help="Compare existing reports")
    compare.add_argument("reports", nargs="+", type=Path, help="report.json files or bundle directories")
    compare.add_argument("--output", type=Path, help="Markdown table (default: stdout)")
    compare.add_argument("--json", type=Path, help="Also write the comparison as JSON")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return load_run_config(args.config, seed=args.seed, workers=args.workers, out_dir=args.out_dir)


def _bug(cfg: ExperimentConfig, ref: str, adapter: Any, validate: bool = False) -> BugCase:
    path = Path(ref)
    if not path.is_dir():
        path = cfg.bugs_dir / ref
    return load_bug_case(path, adapter, validate=validate)


def read_pool(path: Path) -> MutationPool:
    try:
        return MutationPool.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IntegrityError(f"cannot read pool {path}: {exc.strerror}", file=str(path)) from exc
    except ValidationError as exc:
        raise IntegrityError(f"{path} is not a valid pool: {exc.errors()[0]['msg']}", file=str(path)) from exc


def write_pool(pool: MutationPool, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(pool.model_dump_json(indent=2) + "\n", encoding="utf-8")


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    adapter = create_adapter(cfg)
    bug = _bug(cfg, args.bug, adapter, validate=not args.no_validate)
    generators = build_generators(cfg, load_config()["api_key"])
    wanted = set(args.generator or [g.id for g in generators])
    unknown = wanted - {g.id for g in generators}
    if unknown:
        raise IntegrityError(f"unknown generators {sorted(unknown)}")
    window = extract_target(bug, cfg.context_length)
    for generator in generators:
        if generator.id not in wanted:
            continue
        pool = generator.generate(bug, window)
        path = cfg.out_dir / "pools" / f"pool-{bug.id}-{generator.id}.json"
        write_pool(pool, path)
        print(path)
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    cfg = _config(args)
    adapter = create_adapter(cfg)
    bug = _bug(cfg, args.bug, adapter)
    pool = read_pool(args.pool)
    workers = cfg.workers
    results = screen_records(adapter, bug.fixed_source, needs_compilation(pool), workers, load_config()["work_dir"])
    classified = classify(pool, results)
    write_pool(classified, args.output or args.pool)
    return 0


def cmd_execute(args: argparse.Namespace) -> int:
    cfg = _config(args)
    adapter = create_adapter(cfg)
    bug = _bug(cfg, args.bug, adapter)
    pool = read_pool(args.pool)
    if not pool.is_classified:
        raise IntegrityError("pool is not classified, run filter first", file=str(args.pool))
    viable = pool.viable()
    if not viable:
        raise MetricError("pool has no viable mutants to execute")
    work_dir = load_config()["work_dir"]
    matrix = build_kill_matrix(
        adapter,
        bug.fixed_source,
        viable,
        list_bug_tests(adapter, bug, work_dir),
        timeout=cfg.timeout,
        workers=cfg.workers,
        work_dir=work_dir,
        multiplier=cfg.timeout_multiplier,
    )
    output = args.output or cfg.out_dir / f"killmatrix-{bug.id}-{pool.generator_id}.csv"
    write_kill_matrix_csv(matrix, output)
    print(output)
    return 0


def metrics_report(
    cfg: ExperimentConfig,
    bug: BugCase,
    pool: MutationPool,
    matrix_path: Path | None = None,
    labels_path: Path | None = None,
) -> dict[str, Any]:
    """Every metric section for one classified pool."""
    labels = read_labels(labels_path) if labels_path else None
    if labels is not None:
        pool = apply_labels(pool, labels)
    report: dict[str, Any] = {"bug": bug.id, "generator": pool.generator_id}
    report["usability"] = usability(pool, labels).model_dump()

    spec = next((g for g in cfg.generators if g.id == pool.generator_id), None)
    backend = cfg.backend(spec.backend) if spec is not None and spec.kind == "llm" and spec.backend else None
    try:
        report["cost"] = cost_of(pool.generations, backend).model_dump()
    except CostError:
        report["cost"] = NOT_COMPUTED

    syntax = syntactic_report(pool, bug)
    report["syntactic"] = syntax.model_dump(exclude={"mutations"})

    failed = pool.with_kind(StatusKind.NON_COMPILABLE)
    types = error_type_counts(failed, compile_rules(cfg.classifier_rules))
    report["errors"] = {
        "noncompilable": len(failed),
        "types": shares(types),
        "deletion_share": noncompilable_deletions(pool) / len(failed) if failed else None,
        "origin_nodes": origin_node_distribution(pool, bug.fixed_source.read),
    }

    if matrix_path is None:
        report["behavior"] = NOT_COMPUTED
    else:
        matrix = read_kill_matrix_csv(matrix_path)
        row = bug_behavior(bug.id, matrix, bug.triggering_tests)
        report["behavior"] = {
            "detected": row.detected,
            "executed": row.mutants,
            "killed": row.killed,
            "coupled": row.coupled,
            "coupling_rate": row.coupling_rate,
            "mean_ochiai": row.mean_ochiai,
            "mutation_score": row.killed / row.mutants if row.mutants else None,
        }
    return report


def cmd_metrics(args: argparse.Namespace) -> int:
    cfg = _config(args)
    bug = _bug(cfg, args.bug, None)
    pool = read_pool(args.pool)
    report = metrics_report(cfg, bug, pool, args.matrix, args.labels)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = _config(args)
    pool = read_pool(args.pool)
    population = pool.viable() if pool.is_classified else list(pool.records)
    if not population:
        raise MetricError("pool has no mutants to sample")
    plan = SamplingPlan.for_population(len(population), args.confidence, args.margin, seed=cfg.seed)
    chosen = set(plan.draw([r.id for r in population]))
    annotators = tuple(a.strip() for a in args.annotators.split(",")) if args.annotators else ("",)
    output = args.output or cfg.out_dir / f"sample-{pool.generator_id}.csv"
    write_label_skeleton([r for r in population if r.id in chosen], output, annotators)
    logger.info(
        "Equivalence sample written",
        extra={"extra_fields": {"population": plan.population, "sample_size": plan.n, "output": str(output)}},
    )
    print(output)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = _config(args)
    outcome = run_experiment(cfg)
    is_valid, errors = ReportValidator().validate_closure(
        outcome.report, json.loads(outcome.manifest.model_dump_json())
    )
    if not is_valid:
        raise IntegrityError(f"report does not close over the manifest: {errors[:10]}")
    print(cfg.out_dir / "summary.md")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    reports = []
    for path in args.reports:
        label = path.name if path.is_dir() else path.parent.name
        reports.append((label or str(path), load_report(path)))
    seed = args.seed if args.seed is not None else 0
    comparison = compare_reports(reports, seed=seed)
    _emit(render_comparison(comparison), args.output)
    if args.json:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(comparison, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "filter": cmd_filter,
    "execute": cmd_execute,
    "metrics": cmd_metrics,
    "sample": cmd_sample,
    "experiment": cmd_experiment,
    "compare": cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the mutforge CLI."""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else load_config()["log_level"])
    try:
        return COMMANDS[args.command](args)
    except MutforgeError as exc:
        logger.debug("Command failed", exc_info=True)
        if args.verbose:
            sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        else:
            sys.stderr.write(f"mutforge: {exc}\n")
        return 1
    except Exception as exc:
        logger.debug("Command crashed", exc_info=True)
        payload = {"error": "INTERNAL", "type": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(payload, default=str) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
