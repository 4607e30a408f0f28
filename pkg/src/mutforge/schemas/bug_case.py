"""
Bug case schemas.

A BugCase pairs the developer-fixed version of a project with the buggy
version and the tests that expose the bug. Snapshots are directories
on disk; the schemas hold their paths and never copy their contents.

On-disk layout of a bug case directory:

    bug-001/
        bug.json      {"location": {...}, "triggering_tests": [...]}
        fixed/        project sources, developer fix applied
        buggy/        project sources, bug present
        tests/        test sources shared by both versions
"""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from mutforge.schemas.location import SourceLocation


class ProjectSnapshot(BaseModel):
    """
    One version of a project.

    Attributes:
        source_root: Directory with the program sources.
        tests_root: Directory with the test sources.
    """

    model_config = ConfigDict(frozen=True)

    source_root: Path
    tests_root: Path

    def read(self, relative: str) -> str:
        """Text of a source file, newlines normalized to ``\\n``."""
        text = (self.source_root / relative).read_text(encoding="utf-8")
        return text.replace("\r\n", "\n")

    def source_files(self) -> list[str]:
        """Relative POSIX paths of every source file, sorted."""
        return sorted(
            p.relative_to(self.source_root).as_posix()
            for p in self.source_root.rglob("*")
            if p.is_file()
        )


class BugCase(BaseModel):
    """
    A seeded real bug.

    Attributes:
        id: Bug identifier (directory name).
        fixed_source: The fixed version.
        buggy_source: The buggy version.
        bug_location: Lines of the fixed source that the bug touches.
        triggering_tests: Tests that pass on fixed and fail on buggy.
        description: Free-text note from bug.json.
    """

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Bug identifier", examples=["bug-001"])
    fixed_source: ProjectSnapshot
    buggy_source: ProjectSnapshot
    bug_location: SourceLocation
    triggering_tests: frozenset[str]
    description: str = ""

    @field_validator("triggering_tests")
    @classmethod
    def validate_triggering_tests(cls, v: frozenset[str]) -> frozenset[str]:
        if not v:
            raise ValueError("BUG_CASE: at least one bug-triggering test is required")
        return v
