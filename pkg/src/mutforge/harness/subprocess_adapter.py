"""
Toolchain adapter that shells out to configured commands.

Commands run with the workspace root as working directory and without a
shell. ``test_cmd`` is a template; ``{test_id}`` is replaced per test.

    check_cmd       exit code 0 = compiles; output lines shaped like
                    ``path:line: message`` become located diagnostics
    list_tests_cmd  one test id per stdout line
    test_cmd        exit code == pass_exit_code -> Pass, other codes -> Fail,
                    killed by a signal or failed to start -> Crash,
                    over the timeout -> Timeout
"""

import logging
import re
import shlex
import subprocess
import time
from collections.abc import Sequence

from mutforge.harness.adapters import Timeouts, ToolchainAdapter, timeout_for
from mutforge.harness.workspace import Workspace
from mutforge.schemas.execution import TestOutcome, Verdict
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import Diagnostic

logger = logging.getLogger(__name__)

DIAGNOSTIC_LINE = re.compile(r"^(?P<file>[^\s:][^:]*):(?P<line>\d+):(?:\d+:)?\s*(?P<message>.+)$")
DEFAULT_CHECK_TIMEOUT = 600.0


def parse_diagnostics(output: str, kind: str = "compiler") -> list[Diagnostic]:
    """
    Diagnostics from compiler output.

    Lines matching ``file:line[:col]: message`` become located diagnostics;
    when none match, the whole output becomes one unlocated diagnostic.
    """
    diagnostics: list[Diagnostic] = []
    for raw in output.splitlines():
        match = DIAGNOSTIC_LINE.match(raw.strip())
        if not match:
            continue
        location = None
        try:
            line = int(match["line"])
            location = SourceLocation(file=match["file"], line_start=line, line_end=line)
        except ValueError:
            location = None
        diagnostics.append(Diagnostic(kind=kind, message=raw.strip(), location=location))
    if not diagnostics:
        text = output.strip() or "check command failed without output"
        diagnostics.append(Diagnostic(kind=kind, message=text))
    return diagnostics


class SubprocessAdapter(ToolchainAdapter):
    """
    Args:
        check_cmd: Compile/check command line.
        test_cmd: Test command template containing ``{test_id}``.
        list_tests_cmd: Command printing test ids.
        pass_exit_code: Exit code meaning a test passed.
        concurrent_safe: Whether several workspaces may run at once.
    """

    name = "subprocess"

    def __init__(
        self,
        check_cmd: str,
        test_cmd: str,
        list_tests_cmd: str,
        pass_exit_code: int = 0,
        concurrent_safe: bool = True,
        check_timeout: float = DEFAULT_CHECK_TIMEOUT,
    ) -> None:
        if "{test_id}" not in test_cmd:
            raise ValueError("ADAPTER_CONFIG: test_cmd must contain '{test_id}'")
        self.check_cmd = check_cmd
        self.test_cmd = test_cmd
        self.list_tests_cmd = list_tests_cmd
        self.pass_exit_code = pass_exit_code
        self.concurrent_safe = concurrent_safe
        self.check_timeout = check_timeout

    def _run(self, command: str, workspace: Workspace, timeout: float) -> subprocess.CompletedProcess:
        return subprocess.run(
            shlex.split(command),
            cwd=workspace.root,
            capture_output=True,
            timeout=timeout,
            shell=False,
            check=False,
        )

    def check(self, workspace: Workspace) -> list[Diagnostic]:
        result = self._run(self.check_cmd, workspace, self.check_timeout)
        if result.returncode == 0:
            return []
        output = (result.stdout + result.stderr).decode("utf-8", errors="replace")
        return parse_diagnostics(output)

    def list_tests(self, workspace: Workspace) -> list[str]:
        result = self._run(self.list_tests_cmd, workspace, self.check_timeout)
        if result.returncode != 0:
            stderr = result.stderr.decode("utf-8", errors="replace").strip()
            raise RuntimeError(f"list_tests_cmd exited with {result.returncode}: {stderr[:500]}")
        stdout = result.stdout.decode("utf-8", errors="replace")
        return [line.strip() for line in stdout.splitlines() if line.strip()]

    def run_tests(
        self,
        workspace: Workspace,
        test_ids: Sequence[str],
        timeout: Timeouts,
    ) -> list[TestOutcome]:
        outcomes: list[TestOutcome] = []
        for test_id in test_ids:
            command = self.test_cmd.replace("{test_id}", test_id)
            limit = timeout_for(timeout, test_id)
            started = time.monotonic()
            try:
                result = self._run(command, workspace, limit)
            except subprocess.TimeoutExpired:
                verdict, detail = Verdict.TIMEOUT, f"exceeded {limit:.1f}s"
            except OSError as exc:
                verdict, detail = Verdict.CRASH, f"could not start test command: {exc}"
            else:
                if result.returncode == self.pass_exit_code:
                    verdict, detail = Verdict.PASS, ""
                elif result.returncode < 0:
                    verdict, detail = Verdict.CRASH, f"killed by signal {-result.returncode}"
                else:
                    verdict, detail = Verdict.FAIL, f"exit code {result.returncode}"
            outcomes.append(
                TestOutcome(
                    test_id=test_id,
                    verdict=verdict,
                    wall_time=time.monotonic() - started,
                    detail=detail,
                )
            )
        return outcomes
