"""
Bug-case loading.

A bug case directory holds ``fixed/``, ``buggy/``, ``tests/`` and
``bug.json``:

    {
      "location": {"file": "calc.mini", "line_start": 4, "line_end": 4},
      "triggering_tests": ["test_sum"],
      "description": "operator flip"
    }

Loading validates the case by running its triggering tests: each must pass
on the fixed version and must not pass on the buggy one.
"""

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from mutforge.errors import FixtureInvalidError
from mutforge.harness.adapters import ToolchainAdapter
from mutforge.harness.minilang import MiniLangAdapter
from mutforge.harness.workspace import materialize
from mutforge.schemas.bug_case import BugCase, ProjectSnapshot
from mutforge.schemas.execution import Verdict
from mutforge.schemas.location import SourceLocation

logger = logging.getLogger(__name__)

BUG_FILE = "bug.json"
VALIDATION_TIMEOUT = 10.0


def discover_bug_cases(root: Path) -> list[Path]:
    """Bug case directories under ``root``, sorted by name."""
    if not root.is_dir():
        raise FixtureInvalidError(f"bug case directory {root} does not exist")
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / BUG_FILE).is_file())


def _read_descriptor(path: Path) -> dict:
    try:
        data = json.loads((path / BUG_FILE).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FixtureInvalidError(f"{path} has no {BUG_FILE}", bug=path.name) from None
    except json.JSONDecodeError as exc:
        raise FixtureInvalidError(f"{path / BUG_FILE}: {exc}", bug=path.name) from exc
    if not isinstance(data, dict):
        raise FixtureInvalidError(f"{path / BUG_FILE} must hold a JSON object", bug=path.name)
    return data


def _run_triggering(
    adapter: ToolchainAdapter,
    project: ProjectSnapshot,
    tests: list[str],
    work_dir: Path | None,
) -> dict[str, Verdict]:
    workspace = materialize(project, None, work_dir)
    try:
        return {o.test_id: o.verdict for o in adapter.run_tests(workspace, tests, VALIDATION_TIMEOUT)}
    finally:
        workspace.remove()


def load_bug_case(
    path: Path,
    adapter: ToolchainAdapter | None = None,
    validate: bool = True,
    work_dir: Path | None = None,
) -> BugCase:
    """
    Load and validate a bug case directory.

    Args:
        path: Bug case directory.
        adapter: Toolchain used for validation (MiniLang by default).
        validate: Run the triggering tests on both versions.
        work_dir: Parent directory for validation workspaces.

    Raises:
        FixtureInvalidError: If a part is missing, bug.json is malformed, the
            location does not resolve, or a triggering test does not pass on
            fixed and fail on buggy.
    """
    bug_id = path.name
    for part in ("fixed", "buggy", "tests"):
        if not (path / part).is_dir():
            raise FixtureInvalidError(f"{path} has no {part}/ directory", bug=bug_id)
    data = _read_descriptor(path)

    tests_root = path / "tests"
    try:
        bug = BugCase(
            id=str(data.get("id", bug_id)),
            fixed_source=ProjectSnapshot(source_root=path / "fixed", tests_root=tests_root),
            buggy_source=ProjectSnapshot(source_root=path / "buggy", tests_root=tests_root),
            bug_location=SourceLocation.model_validate(data.get("location")),
            triggering_tests=frozenset(data.get("triggering_tests") or ()),
            description=str(data.get("description", "")),
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(p) for p in first["loc"])
        raise FixtureInvalidError(f"{path / BUG_FILE}: {key}: {first['msg']}", bug=bug_id) from exc

    fixed_file = bug.fixed_source.source_root / bug.bug_location.file
    if not fixed_file.is_file():
        raise FixtureInvalidError(f"{bug.bug_location.file} does not exist in {path}/fixed", bug=bug_id)
    line_count = len(bug.fixed_source.read(bug.bug_location.file).split("\n"))
    if bug.bug_location.line_end > line_count:
        raise FixtureInvalidError(f"{bug.bug_location} is past the end of the fixed file", bug=bug_id)

    if validate:
        adapter = adapter or MiniLangAdapter()
        tests = sorted(bug.triggering_tests)
        on_fixed = _run_triggering(adapter, bug.fixed_source, tests, work_dir)
        on_buggy = _run_triggering(adapter, bug.buggy_source, tests, work_dir)
        not_passing = [t for t in tests if on_fixed[t] is not Verdict.PASS]
        if not_passing:
            raise FixtureInvalidError(
                f"triggering tests do not pass on the fixed version: {not_passing[:10]}",
                bug=bug_id,
            )
        passing = [t for t in tests if on_buggy[t] is Verdict.PASS]
        if passing:
            raise FixtureInvalidError(
                f"triggering tests pass on the buggy version: {passing[:10]}",
                bug=bug_id,
            )

    logger.info(
        "Bug case loaded",
        extra={
            "extra_fields": {
                "bug_id": bug.id,
                "location": str(bug.bug_location),
                "triggering_tests": sorted(bug.triggering_tests)[:10],
                "validated": validate,
            }
        },
    )
    return bug
