"""
Report assembly and emission.

Bundle layout (one directory per run):

    report.json                    full metric tree
    summary.md                     generator comparison table plus error taxonomy
    manifest.json                  config snapshot, seeds, timestamps, per-cell counts
    killmatrix-<bug>-<gen>.csv     per cell with viable mutants
    sample-<gen>.csv               equivalence-labeling skeleton
    pools/pool-<bug>-<gen>.json    classified pools

Every ratio in report.json is a quotient of manifest counts; the only
non-deterministic values are ``cost.agt`` and ``cost.wall_time``.
"""

import json
import logging
import math
from collections import Counter
from collections.abc import Sequence
from itertools import combinations
from pathlib import Path
from statistics import fmean
from typing import Any

from mutforge.config import ExperimentConfig
from mutforge.errors import CostError, MetricError
from mutforge.harness.execution import write_kill_matrix_csv
from mutforge.llmgen.cost import cost_of
from mutforge.metrics.behavior import behavior_report, is_coupled, ochiai
from mutforge.metrics.labels import EquivalenceLabels, write_label_skeleton
from mutforge.metrics.sampling import SamplingPlan, sample_size
from mutforge.metrics.stats import pearson, spearman
from mutforge.metrics.syntactic import top_kinds
from mutforge.metrics.usability import usability
from mutforge.schemas.mutation import MutationPool
from mutforge.study.analysis import equal_count_subsample
from mutforge.study.experiment import CellResult, RunManifest, merged_pool, sum_counts
from mutforge.validation.classifier import set_counts

logger = logging.getLogger(__name__)

REPORT_FORMAT = "mutforge-report/1"
NOT_COMPUTED = "not computed"
TOP_KINDS = 3

# (row label, path into a generator section, format)
METRIC_ROWS: tuple[tuple[str, tuple[str, ...], str], ...] = (
    ("Mutation count", ("mutation_count",), "int"),
    ("Mutation score", ("behavior", "mutation_score"), "pct"),
    ("CR", ("usability", "cr"), "pct"),
    ("UMR", ("usability", "umr"), "pct"),
    ("EMR", ("usability", "emr"), "pct"),
    ("AGT (s)", ("cost", "agt"), "sec"),
    ("Cost per 1K mutations ($)", ("cost", "usd_per_1k"), "usd"),
    ("BLEU", ("syntactic", "bleu_mean"), "float"),
    ("AST distance", ("syntactic", "ast_distance_mean"), "float"),
    ("Deletion ratio", ("syntactic", "deletion_ratio"), "pct"),
    ("Exact matches", ("syntactic", "exact_matches"), "int"),
    ("RBD", ("behavior", "rbd"), "pct"),
    ("Coupling rate", ("behavior", "cpr_micro"), "pct"),
    ("Ochiai", ("behavior", "ochiai_micro"), "float"),
)
SIMILARITY_FORMATS = frozenset({"pct", "float"})
SUBSAMPLE_METRICS = ("cr", "umr", "coupling_rate", "ochiai", "rbd")


def ratio(numerator: float, denominator: float) -> float | None:
    return numerator / denominator if denominator else None


def _tally(counts: dict[str, int], total: int) -> dict[str, dict[str, float]]:
    return {key: {"count": counts[key], "share": counts[key] / total} for key in sorted(counts)}


def _ok(results: Sequence[CellResult], generator_id: str) -> list[CellResult]:
    return [r for r in results if r.generator_id == generator_id and r.manifest.status == "ok"]


def cell_section(result: CellResult) -> dict[str, Any]:
    if result.manifest.status == "failed" or result.manifest.counts is None:
        error = result.manifest.error or {}
        return {"status": "failed", "error": error.get("error", "INTERNAL")}
    c = result.manifest.counts
    section: dict[str, Any] = {
        "status": "ok",
        "counts": {
            "generated": c.generated,
            "compilable": c.compilable,
            "useless": c.useless,
            "viable": c.viable,
            "noncompilable": c.noncompilable,
            "executed": c.executed,
            "killed": c.killed,
            "coupled": c.coupled,
            "exact_matches": c.exact_matches,
        },
        "cr": ratio(c.compilable, c.generated),
        "umr": ratio(c.useless, c.generated),
        "bleu_mean": ratio(c.bleu_sum, c.bleu_count),
        "ast_distance_mean": ratio(c.ast_distance_sum, c.ast_distance_count),
        "error_types": dict(c.error_types),
    }
    if result.matrix is None:
        section["behavior"] = NOT_COMPUTED
    else:
        section["behavior"] = {
            "detected": bool(c.detected),
            "coupling_rate": ratio(c.coupled, c.executed),
            "mean_ochiai": ratio(c.ochiai_sum, c.executed),
            "mutation_score": ratio(c.killed, c.executed),
        }
    return section


def _cost_section(cfg: ExperimentConfig, generator_id: str, pool: MutationPool) -> dict[str, Any] | None:
    spec = next(g for g in cfg.generators if g.id == generator_id)
    backend = cfg.backend(spec.backend) if spec.kind == "llm" and spec.backend else None
    try:
        cost = cost_of(pool.generations, backend)
    except CostError:
        return None
    return {
        "agt": cost.agt,
        "wall_time": cost.wall_time,
        "usd_per_1k": cost.usd_per_1k,
        "mutations": cost.mutations,
        "prompt_tokens": cost.usage.prompt_tokens,
        "completion_tokens": cost.usage.completion_tokens,
    }


def generator_section(
    cfg: ExperimentConfig,
    generator_id: str,
    results: Sequence[CellResult],
    labels: EquivalenceLabels | None = None,
) -> dict[str, Any]:
    """Aggregate metrics of one generator over its completed cells."""
    ok = _ok(results, generator_id)
    failed = sum(1 for r in results if r.generator_id == generator_id) - len(ok)
    totals = sum_counts([r.manifest.counts for r in ok if r.manifest.counts is not None])
    pool = merged_pool(list(results), generator_id)

    section: dict[str, Any] = {
        "cells": {"ok": len(ok), "failed": failed},
        "mutation_count": totals.generated,
    }

    if totals.generated:
        report = usability(pool, labels)
        section["usability"] = {
            "generated": report.generated,
            "compilable": report.compilable,
            "useless": report.useless,
            "viable": report.viable,
            "cr": report.cr,
            "umr": report.umr,
            "emr": report.emr,
            "sample_size": report.sample_size,
            "equivalent": report.equivalent,
            "kappa": report.kappa,
        }
    else:
        section["usability"] = NOT_COMPUTED

    section["cost"] = _cost_section(cfg, generator_id, pool)

    if ok:
        behavior = behavior_report(
            {r.bug_id: r.triggering for r in ok},
            {r.bug_id: r.matrix for r in ok},
        )
        section["behavior"] = {
            "bugs_considered": len(ok),
            "bugs_detected": totals.detected,
            "executed": totals.executed,
            "killed": totals.killed,
            "coupled": totals.coupled,
            "rbd": behavior.rbd,
            "cpr_micro": behavior.cpr_micro,
            "cpr_macro": behavior.cpr_macro,
            "ochiai_micro": behavior.ochiai_micro,
            "ochiai_macro": behavior.ochiai_macro,
            "mutation_score": behavior.mutation_score,
        }
    else:
        section["behavior"] = NOT_COMPUTED

    histogram = Counter(totals.new_kinds)
    section["syntactic"] = {
        "bleu_mean": ratio(totals.bleu_sum, totals.bleu_count),
        "ast_distance_mean": ratio(totals.ast_distance_sum, totals.ast_distance_count),
        "deletions": totals.deletions,
        "diversity_base": totals.diversity_base,
        "deletion_ratio": ratio(totals.deletions, totals.diversity_base),
        "histogram": dict(sorted(histogram.items())),
        "top_kinds": [k.model_dump() for k in top_kinds(histogram, TOP_KINDS)],
        "exact_matches": totals.exact_matches,
        "exact_match_bugs": sum(
            1 for r in ok if r.manifest.counts is not None and r.manifest.counts.exact_matches
        ),
    }

    origin_total = sum(totals.origin_nodes.values())
    section["errors"] = {
        "noncompilable": totals.noncompilable,
        "types": _tally(totals.error_types, totals.noncompilable) if totals.noncompilable else {},
        "deletions": totals.noncompilable_deletions,
        "deletion_share": ratio(totals.noncompilable_deletions, totals.noncompilable),
        "origin_nodes": _tally(totals.origin_nodes, origin_total) if origin_total else {},
    }

    section["sample"] = {
        "population": totals.viable,
        "size": sample_size(totals.viable, cfg.confidence, cfg.margin) if totals.viable else 0,
        "confidence": cfg.confidence,
        "margin": cfg.margin,
    }
    return section


def _subsample_metrics(pool: MutationPool, owners: dict[str, CellResult], bugs_considered: int) -> dict[str, float | None]:
    generated, compilable, useless, _ = set_counts(pool)
    coupled = 0
    ochiai_values: list[float] = []
    detected: set[str] = set()
    for record in pool.viable():
        owner = owners[record.id]
        if owner.matrix is None:
            continue
        killing = owner.matrix.killing_tests(record.id)
        ochiai_values.append(ochiai(killing, owner.triggering))
        if is_coupled(killing, owner.triggering):
            coupled += 1
            detected.add(owner.bug_id)
    return {
        "cr": ratio(compilable, generated),
        "umr": ratio(useless, generated),
        "coupling_rate": ratio(coupled, len(ochiai_values)),
        "ochiai": math.fsum(ochiai_values) / len(ochiai_values) if ochiai_values else None,
        "rbd": ratio(len(detected), bugs_considered),
    }


def _spread(values: list[float | None]) -> dict[str, float] | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return {"mean": fmean(present), "min": min(present), "max": max(present)}


def subsample_section(
    cfg: ExperimentConfig,
    generator_ids: Sequence[str],
    results: Sequence[CellResult],
) -> dict[str, Any]:
    """Mean/min/max of the headline ratios over equal-count subsampling rounds."""
    if cfg.subsample_rounds == 0 or not generator_ids:
        return {"status": "skipped", "reason": "no subsampling rounds"}
    pools = [merged_pool(list(results), g) for g in generator_ids]
    empty = [p.generator_id for p in pools if not p.records]
    if empty:
        return {"status": "skipped", "reason": f"empty pools: {', '.join(empty)}"}

    owners = {r.id: cell for cell in results if cell.pool is not None for r in cell.pool.records}
    considered = {g: len(_ok(results, g)) for g in generator_ids}
    rounds: dict[str, list[dict[str, float | None]]] = {g: [] for g in generator_ids}
    for round_index in range(cfg.subsample_rounds):
        for subset in equal_count_subsample(pools, cfg.seed + round_index):
            rounds[subset.generator_id].append(
                _subsample_metrics(subset, owners, considered[subset.generator_id])
            )
    return {
        "status": "ok",
        "rounds": cfg.subsample_rounds,
        "size": min(len(p.records) for p in pools),
        "generators": {
            g: {m: _spread([row[m] for row in rounds[g]]) for m in SUBSAMPLE_METRICS}
            for g in generator_ids
        },
    }


def build_report(
    cfg: ExperimentConfig,
    generator_ids: Sequence[str],
    bug_ids: Sequence[str],
    results: Sequence[CellResult],
    labels: EquivalenceLabels | None = None,
) -> dict[str, Any]:
    """The full metric tree for report.json."""
    by_cell = {(r.bug_id, r.generator_id): r for r in results}
    return {
        "format": REPORT_FORMAT,
        "run": {
            "seed": cfg.seed,
            "context_length": cfg.context_length,
            "confidence": cfg.confidence,
            "margin": cfg.margin,
            "subsample_rounds": cfg.subsample_rounds,
            "generators": list(generator_ids),
            "bugs": list(bug_ids),
        },
        "generators": {g: generator_section(cfg, g, results, labels) for g in generator_ids},
        "cells": {
            bug_id: {g: cell_section(by_cell[(bug_id, g)]) for g in generator_ids if (bug_id, g) in by_cell}
            for bug_id in bug_ids
        },
        "subsample": subsample_section(cfg, generator_ids, results),
    }


def lookup(section: Any, path: Sequence[str]) -> Any:
    """Value at ``path``; None when a step is missing or not a mapping."""
    for key in path:
        if not isinstance(section, dict):
            return None
        section = section.get(key)
    return section


def format_value(value: Any, kind: str) -> str:
    if value is None or isinstance(value, str):
        return "n/a"
    if kind == "int":
        return str(int(value))
    if kind == "pct":
        return f"{100 * value:.1f}%"
    if kind == "sec":
        return f"{value:.3f}"
    if kind == "usd":
        return f"{value:.4f}"
    return f"{value:.3f}"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return lines


def performance_table(columns: dict[str, dict[str, Any]]) -> list[str]:
    """Metric rows x generator columns."""
    names = list(columns)
    rows = [
        [label, *(format_value(lookup(columns[n], path), kind) for n in names)]
        for label, path, kind in METRIC_ROWS
    ]
    return _table(["Metric", *names], rows)


def render_summary(report: dict[str, Any]) -> str:
    """summary.md for one report."""
    generators: dict[str, dict[str, Any]] = report["generators"]
    run = report["run"]
    lines = [
        "# Mutation study summary",
        "",
        f"Bugs: {len(run['bugs'])}. Generators: {', '.join(run['generators']) or 'none'}. "
        f"Context length: {run['context_length']}. Seed: {run['seed']}.",
        "",
        "## Overall performance",
        "",
        *performance_table(generators),
        "",
        "## Compile error types",
        "",
    ]
    kinds = sorted({t for section in generators.values() for t in section["errors"]["types"]})
    if kinds:
        rows = [
            [kind, *(format_value(lookup(s, ("errors", "types", kind, "share")), "pct") for s in generators.values())]
            for kind in kinds
        ]
        rows.append(
            ["Deletions", *(format_value(s["errors"]["deletion_share"], "pct") for s in generators.values())]
        )
        lines.extend(_table(["Error type", *generators], rows))
    else:
        lines.append("No non-compilable mutants.")

    subsample = report["subsample"]
    lines.extend(["", "## Equal-count subsampling", ""])
    if subsample.get("status") == "ok":
        lines.append(f"{subsample['rounds']} rounds of {subsample['size']} mutants per generator (mean, min-max).")
        lines.append("")
        rows = []
        for metric in SUBSAMPLE_METRICS:
            cells = []
            for g in generators:
                spread = subsample["generators"][g][metric]
                cells.append(
                    "n/a" if spread is None
                    else f"{spread['mean']:.3f} ({spread['min']:.3f}-{spread['max']:.3f})"
                )
            rows.append([metric, *cells])
        lines.extend(_table(["Metric", *generators], rows))
    else:
        lines.append(f"Skipped: {subsample.get('reason', '')}.")

    failed = [
        f"{bug}/{g}: {cell['error']}"
        for bug, row in report["cells"].items()
        for g, cell in row.items()
        if cell["status"] == "failed"
    ]
    if failed:
        lines.extend(["", "## Failed cells", "", *(f"- {item}" for item in failed)])
    return "\n".join(lines) + "\n"


def _safe(name: str) -> str:
    return name.replace("/", "_").replace("\\", "_")


def write_bundle(
    out_dir: Path,
    manifest: RunManifest,
    report: dict[str, Any],
    results: Sequence[CellResult],
    cfg: ExperimentConfig,
) -> RunManifest:
    """
    Write every bundle file.

    Returns:
        The manifest with its ``outputs`` list filled in.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[str] = []

    for result in results:
        stem = f"{_safe(result.bug_id)}-{_safe(result.generator_id)}"
        if result.matrix is not None:
            name = f"killmatrix-{stem}.csv"
            write_kill_matrix_csv(result.matrix, out_dir / name)
            outputs.append(name)
        if result.pool is not None:
            name = f"pools/pool-{stem}.json"
            (out_dir / "pools").mkdir(exist_ok=True)
            (out_dir / name).write_text(result.pool.model_dump_json(indent=2) + "\n", encoding="utf-8")
            outputs.append(name)

    for generator_id in manifest.generators:
        viable = merged_pool(list(results), generator_id).viable()
        if not viable:
            continue
        plan = SamplingPlan.for_population(len(viable), cfg.confidence, cfg.margin, seed=cfg.seed)
        chosen = set(plan.draw([r.id for r in viable]))
        name = f"sample-{_safe(generator_id)}.csv"
        write_label_skeleton([r for r in viable if r.id in chosen], out_dir / name)
        outputs.append(name)

    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "summary.md").write_text(render_summary(report), encoding="utf-8")
    outputs.extend(["report.json", "summary.md", "manifest.json"])

    manifest = manifest.model_copy(update={"outputs": sorted(outputs)})
    (out_dir / "manifest.json").write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Report bundle written",
        extra={"extra_fields": {"out_dir": str(out_dir), "files": len(outputs)}},
    )
    return manifest


def load_report(path: Path) -> dict[str, Any]:
    """report.json from a file or a bundle directory."""
    target = path / "report.json" if path.is_dir() else path
    try:
        return json.loads(target.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MetricError(f"cannot read report {target}: {exc}") from exc


def _vector(section: dict[str, Any]) -> dict[str, float]:
    values: dict[str, float] = {}
    for label, path, kind in METRIC_ROWS:
        value = lookup(section, path)
        if kind in SIMILARITY_FORMATS and isinstance(value, int | float):
            values[label] = float(value)
    return values


def compare_reports(
    reports: Sequence[tuple[str, dict[str, Any]]],
    permutations: int = 10_000,
    seed: int = 0,
) -> dict[str, Any]:
    """
    Side-by-side columns and pairwise similarity of their metric vectors.

    Args:
        reports: (label, report) pairs; labels prefix column names when
            there is more than one report.
        permutations: Permutations for the correlation p-values.
        seed: Permutation seed.
    """
    columns: dict[str, dict[str, Any]] = {}
    for label, report in reports:
        for generator_id, section in report["generators"].items():
            name = generator_id if len(reports) == 1 else f"{label}/{generator_id}"
            columns[name] = section

    vectors = {name: _vector(section) for name, section in columns.items()}
    similarity: list[dict[str, Any]] = []
    for a, b in combinations(columns, 2):
        shared = [m for m in vectors[a] if m in vectors[b]]
        row: dict[str, Any] = {"a": a, "b": b, "metrics": len(shared)}
        xs = [vectors[a][m] for m in shared]
        ys = [vectors[b][m] for m in shared]
        try:
            rho = spearman(xs, ys, permutations=permutations, seed=seed)
            r = pearson(xs, ys, permutations=permutations, seed=seed)
        except MetricError as exc:
            row.update({"spearman": None, "pearson": None, "reason": exc.detail})
        else:
            row.update(
                {
                    "spearman": rho.coefficient,
                    "spearman_p": rho.p_value,
                    "pearson": r.coefficient,
                    "pearson_p": r.p_value,
                }
            )
        similarity.append(row)
    return {"columns": columns, "similarity": similarity}


def render_comparison(comparison: dict[str, Any]) -> str:
    lines = ["# Generator comparison", "", *performance_table(comparison["columns"]), "", "## Similarity", ""]
    if not comparison["similarity"]:
        lines.append("Fewer than two columns, nothing to compare.")
    else:
        rows = []
        for row in comparison["similarity"]:
            if row["spearman"] is None:
                rows.append([row["a"], row["b"], str(row["metrics"]), "n/a", "n/a", "n/a", "n/a"])
            else:
                rows.append(
                    [
                        row["a"],
                        row["b"],
                        str(row["metrics"]),
                        f"{row['spearman']:.3f}",
                        f"{row['spearman_p']:.4f}",
                        f"{row['pearson']:.3f}",
                        f"{row['pearson_p']:.4f}",
                    ]
                )
        lines.extend(_table(["A", "B", "Metrics", "Spearman", "p", "Pearson", "p"], rows))
    return "\n".join(lines) + "\n"
