"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

import pytest

# Add src/ to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from mutforge.config import bundled_bugs_dir  # noqa: E402
from mutforge.schemas.bug_case import BugCase  # noqa: E402
from mutforge.schemas.location import SourceLocation  # noqa: E402
from mutforge.schemas.mutation import MutationPool, MutationRecord  # noqa: E402
from mutforge.study.fixtures import load_bug_case  # noqa: E402


@pytest.fixture
def bugs_dir() -> Path:
    """Bundled MiniLang bug cases."""
    return bundled_bugs_dir()


@pytest.fixture
def load_bug(bugs_dir):
    """Load a bundled bug case by id without re-running its tests."""

    def _load(bug_id: str) -> BugCase:
        return load_bug_case(bugs_dir / bug_id, validate=False)

    return _load


@pytest.fixture
def make_record():
    """Build an unclassified record on one line of ``calc.mini``."""

    def _make(
        record_id: str,
        original: str,
        mutated: str,
        line: int = 1,
        file: str = "calc.mini",
        origin: str = "stub:P1",
        **fields,
    ) -> MutationRecord:
        return MutationRecord(
            id=record_id,
            origin=origin,
            location=SourceLocation(file=file, line_start=line, line_end=line),
            original_text=original,
            mutated_text=mutated,
            **fields,
        )

    return _make


@pytest.fixture
def make_pool():
    """Wrap records into a pool."""

    def _make(records, generator_id: str = "stub-p1", project_id: str = "bug-001", **fields) -> MutationPool:
        return MutationPool(records=tuple(records), generator_id=generator_id, project_id=project_id, **fields)

    return _make
