"""
Bug-case studies: fixtures, the experiment grid and its reports.

This module exports:
- load_bug_case, discover_bug_cases: bug-case fixtures
- ErrorType, classify_compile_error: compile-error taxonomy
- extract_target: mutation target window and prompt context
- origin_node_distribution, equal_count_subsample: pool analyses
- RuleGenerator, LlmGenerator: grid columns
- run_experiment, RunManifest: orchestration
- build_report, compare_reports, render_summary: report emission

Example:
    >>> from mutforge.study import run_experiment
    >>> outcome = run_experiment(cfg)
"""

from mutforge.study.analysis import (
    changed_span,
    equal_count_subsample,
    noncompilable_deletions,
    origin_node,
    origin_node_counts,
    origin_node_distribution,
)
from mutforge.study.context import TargetWindow, extract_target, window_lines
from mutforge.study.experiment import (
    CellCounts,
    CellManifest,
    CellResult,
    ExperimentOutcome,
    RunManifest,
    create_adapter,
    run_cell,
    run_experiment,
)
from mutforge.study.fixtures import discover_bug_cases, load_bug_case
from mutforge.study.generators import Generator, LlmGenerator, RuleGenerator, build_generators, split_usage
from mutforge.study.reporting import (
    build_report,
    compare_reports,
    load_report,
    render_comparison,
    render_summary,
    write_bundle,
)
from mutforge.study.taxonomy import ErrorType, classify_compile_error, compile_rules, error_type_counts

__all__ = [
    "CellCounts",
    "CellManifest",
    "CellResult",
    "ErrorType",
    "ExperimentOutcome",
    "Generator",
    "LlmGenerator",
    "RuleGenerator",
    "RunManifest",
    "TargetWindow",
    "build_generators",
    "build_report",
    "changed_span",
    "classify_compile_error",
    "compare_reports",
    "compile_rules",
    "create_adapter",
    "discover_bug_cases",
    "equal_count_subsample",
    "error_type_counts",
    "extract_target",
    "load_bug_case",
    "load_report",
    "noncompilable_deletions",
    "origin_node",
    "origin_node_counts",
    "origin_node_distribution",
    "render_comparison",
    "render_summary",
    "run_cell",
    "run_experiment",
    "split_usage",
    "window_lines",
    "write_bundle",
]
