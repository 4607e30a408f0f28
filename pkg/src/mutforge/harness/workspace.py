"""
Mutant workspaces.

A workspace is an isolated copy of a project with at most one mutation
applied:

    <root>/src/    copy of the project sources, mutated span replaced
    <root>/tests/  copy of the project tests

Materialization is deterministic: two workspaces for the same mutant are
byte-identical.
"""

import logging
import shutil
import tempfile
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from mutforge.errors import StaleSourceError
from mutforge.schemas.bug_case import ProjectSnapshot
from mutforge.schemas.mutation import MutationRecord

logger = logging.getLogger(__name__)

SOURCE_DIR = "src"
TESTS_DIR = "tests"


class Workspace(BaseModel):
    """
    Attributes:
        root: Workspace directory.
        applied: Id of the applied mutation, None for a clean baseline copy.
    """

    model_config = ConfigDict(frozen=True)

    root: Path
    applied: str | None = None

    @property
    def source_root(self) -> Path:
        return self.root / SOURCE_DIR

    @property
    def tests_root(self) -> Path:
        return self.root / TESTS_DIR

    def snapshot(self) -> ProjectSnapshot:
        return ProjectSnapshot(source_root=self.source_root, tests_root=self.tests_root)

    def remove(self) -> None:
        shutil.rmtree(self.root, ignore_errors=True)


def _normalize(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def apply_to_text(text: str, record: MutationRecord) -> str:
    """
    Replace the record's line span in ``text`` with its mutated text.

    Raises:
        StaleSourceError: If the span does not resolve or does not match
            ``record.original_text``.
    """
    text = _normalize(text)
    lines = text.split("\n")
    loc = record.location
    if loc.line_end > len(lines):
        raise StaleSourceError(
            f"{loc} is past the end of the file ({len(lines)} lines)",
            record=record.id,
        )
    current = "\n".join(lines[loc.line_start - 1:loc.line_end])
    if current != _normalize(record.original_text):
        raise StaleSourceError(
            f"{loc} does not match the recorded original text",
            record=record.id,
        )
    mutated = _normalize(record.mutated_text).split("\n")
    return "\n".join([*lines[:loc.line_start - 1], *mutated, *lines[loc.line_end:]])


def _scratch_root(work_dir: Path | None) -> Path:
    if work_dir is None:
        return Path(tempfile.mkdtemp(prefix="mutforge-"))
    work_dir.mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix="ws-", dir=work_dir))


def materialize(
    project: ProjectSnapshot,
    record: MutationRecord | None = None,
    work_dir: Path | None = None,
) -> Workspace:
    """
    Copy a project into a fresh workspace and apply one mutation.

    Args:
        project: Project snapshot to copy.
        record: Mutation to apply; None gives an unmutated copy.
        work_dir: Parent directory for workspaces (system temp when None).

    Returns:
        The materialized workspace.

    Raises:
        StaleSourceError: If the mutation no longer matches the project.
    """
    root = _scratch_root(work_dir)
    workspace = Workspace(root=root, applied=record.id if record else None)
    try:
        shutil.copytree(project.source_root, workspace.source_root)
        if project.tests_root.is_dir():
            shutil.copytree(project.tests_root, workspace.tests_root)
        else:
            workspace.tests_root.mkdir()

        if record is not None:
            target = workspace.source_root / record.location.file
            if not target.is_file():
                raise StaleSourceError(f"{record.location.file} does not exist in the project", record=record.id)
            mutated = apply_to_text(target.read_text(encoding="utf-8"), record)
            target.write_text(mutated, encoding="utf-8", newline="\n")
    except Exception:
        workspace.remove()
        raise

    logger.debug(
        "Workspace materialized",
        extra={"extra_fields": {"root": str(root), "applied": workspace.applied}},
    )
    return workspace
