"""
Mutant execution harness.

This module exports:
- ToolchainAdapter: adapter contract; MiniLangAdapter and SubprocessAdapter implement it
- Workspace, materialize, apply_to_text: mutant workspaces
- screen_compile, screen_records: compilation screening
- build_kill_matrix, mutation_score: test execution and scoring
- write_kill_matrix_csv, read_kill_matrix_csv: kill matrix CSV export

Example:
    >>> from mutforge.harness import MiniLangAdapter, build_kill_matrix
"""

from mutforge.harness.adapters import ToolchainAdapter
from mutforge.harness.execution import (
    BASELINE_ROW,
    build_kill_matrix,
    default_workers,
    mutation_score,
    read_kill_matrix_csv,
    run_baseline,
    screen_compile,
    screen_records,
    write_kill_matrix_csv,
)
from mutforge.harness.interpreter import ExecutionTimeout, Interpreter, MiniRuntimeError
from mutforge.harness.minilang import MiniLangAdapter
from mutforge.harness.subprocess_adapter import SubprocessAdapter, parse_diagnostics
from mutforge.harness.workspace import Workspace, apply_to_text, materialize

__all__ = [
    "BASELINE_ROW",
    "ExecutionTimeout",
    "Interpreter",
    "MiniLangAdapter",
    "MiniRuntimeError",
    "SubprocessAdapter",
    "ToolchainAdapter",
    "Workspace",
    "apply_to_text",
    "build_kill_matrix",
    "default_workers",
    "materialize",
    "mutation_score",
    "parse_diagnostics",
    "read_kill_matrix_csv",
    "run_baseline",
    "screen_compile",
    "screen_records",
    "write_kill_matrix_csv",
]
