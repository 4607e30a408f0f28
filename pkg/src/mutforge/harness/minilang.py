"""
In-process toolchain adapter for MiniLang projects.

Sources are ``src/**/*.mini``; tests are functions named ``test_*`` in
``tests/**/*.mini`` that take no arguments and return bool. Checking uses the
static checker over sources and tests together; tests run in the interpreter
with a fresh step budget each, so they cannot affect one another.
"""

import logging
import time
from collections.abc import Sequence
from pathlib import Path

from mutforge.errors import LexicalError, ParseError
from mutforge.harness.adapters import Timeouts, ToolchainAdapter, timeout_for
from mutforge.harness.interpreter import (
    DEFAULT_MAX_STEPS,
    ExecutionTimeout,
    Interpreter,
    MiniRuntimeError,
)
from mutforge.harness.workspace import SOURCE_DIR, TESTS_DIR, Workspace
from mutforge.schemas.execution import TestOutcome, Verdict
from mutforge.schemas.mutation import Diagnostic
from mutforge.syntax.checker import check_program
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tree import SyntaxTree

logger = logging.getLogger(__name__)

SUFFIX = ".mini"
TEST_PREFIX = "test_"


def read_program(root: Path) -> dict[str, str]:
    """Relative path (``src/...`` or ``tests/...``) -> source for every .mini file."""
    files: dict[str, str] = {}
    for sub in (SOURCE_DIR, TESTS_DIR):
        base = root / sub
        if not base.is_dir():
            continue
        for path in sorted(base.rglob(f"*{SUFFIX}")):
            relative = path.relative_to(root).as_posix()
            files[relative] = path.read_text(encoding="utf-8").replace("\r\n", "\n")
    return files


class MiniLangAdapter(ToolchainAdapter):
    """
    Args:
        max_steps: Interpreter step budget per test.
    """

    name = "minilang"
    concurrent_safe = True

    def __init__(self, max_steps: int = DEFAULT_MAX_STEPS) -> None:
        self.max_steps = max_steps

    def check(self, workspace: Workspace) -> list[Diagnostic]:
        return check_program(read_program(workspace.root))

    def list_tests(self, workspace: Workspace) -> list[str]:
        tests: list[str] = []
        for relative, source in read_program(workspace.root).items():
            if not relative.startswith(f"{TESTS_DIR}/"):
                continue
            try:
                tree = parse_mini(source)
            except (LexicalError, ParseError):
                logger.warning(
                    "Test file does not parse",
                    extra={"extra_fields": {"file": relative}},
                )
                continue
            tests.extend(
                fn.label for fn in tree.functions()
                if fn.label and fn.label.startswith(TEST_PREFIX) and fn.label not in tests
            )
        return tests

    def run_tests(
        self,
        workspace: Workspace,
        test_ids: Sequence[str],
        timeout: Timeouts,
    ) -> list[TestOutcome]:
        trees: list[SyntaxTree] = []
        load_error: str | None = None
        for relative, source in read_program(workspace.root).items():
            try:
                trees.append(parse_mini(source))
            except (LexicalError, ParseError) as exc:
                load_error = f"{relative}: {exc}"
                break

        outcomes: list[TestOutcome] = []
        for test_id in test_ids:
            if load_error is not None:
                outcomes.append(TestOutcome(test_id=test_id, verdict=Verdict.CRASH, detail=load_error))
                continue
            limit = timeout_for(timeout, test_id)
            started = time.monotonic()
            interpreter = Interpreter.from_trees(
                trees, max_steps=self.max_steps, deadline=started + limit
            )
            verdict, detail = self._run_one(interpreter, test_id)
            outcomes.append(
                TestOutcome(
                    test_id=test_id,
                    verdict=verdict,
                    wall_time=time.monotonic() - started,
                    detail=detail,
                )
            )
        return outcomes

    @staticmethod
    def _run_one(interpreter: Interpreter, test_id: str) -> tuple[Verdict, str]:
        try:
            result = interpreter.run(test_id)
        except ExecutionTimeout as exc:
            return Verdict.TIMEOUT, str(exc)
        except MiniRuntimeError as exc:
            return Verdict.CRASH, str(exc)
        if result is True:
            return Verdict.PASS, ""
        if result is False:
            return Verdict.FAIL, ""
        return Verdict.CRASH, f"test returned {result!r}, expected bool"
