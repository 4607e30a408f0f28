"""
Toolchain adapter contract.

An adapter binds mutforge to a concrete build/test system:

    check(workspace)                      -> diagnostics (empty = compiles)
    list_tests(workspace)                 -> test ids
    run_tests(workspace, test_ids, timeout) -> one TestOutcome per id

check never modifies the workspace. run_tests isolates tests from each
other: one test crashing or hanging cannot change another test's verdict.
"""

from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence

from mutforge.harness.workspace import Workspace
from mutforge.schemas.execution import TestOutcome
from mutforge.schemas.mutation import Diagnostic

Timeouts = float | Mapping[str, float]


def timeout_for(timeouts: Timeouts, test_id: str, default: float = 1.0) -> float:
    if isinstance(timeouts, Mapping):
        return float(timeouts.get(test_id, default))
    return float(timeouts)


class ToolchainAdapter(ABC):
    """
    Base class for toolchain adapters.

    Attributes:
        name: Adapter name used in logs and manifests.
        concurrent_safe: Whether concurrent calls on different workspaces are allowed.
    """

    name: str = "adapter"
    concurrent_safe: bool = True

    @abstractmethod
    def check(self, workspace: Workspace) -> list[Diagnostic]:
        """Static check / compilation; an empty list means success."""

    @abstractmethod
    def list_tests(self, workspace: Workspace) -> list[str]:
        """Test ids available in the workspace, in a stable order."""

    @abstractmethod
    def run_tests(
        self,
        workspace: Workspace,
        test_ids: Sequence[str],
        timeout: Timeouts,
    ) -> list[TestOutcome]:
        """Run each test with its timeout; returns outcomes in ``test_ids`` order."""
