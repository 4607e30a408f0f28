"""
Pytest test suite for mutforge schemas.

Tests validation rules for:
- SourceLocation spans and paths
- Diagnostic, MutantStatus and MutationRecord
- MutationPool uniqueness and set views
- KillMatrix totality and killing sets
- Error payloads
"""

import pytest
from pydantic import ValidationError

from mutforge.errors import FixtureInvalidError, IntegrityError, MutforgeError
from mutforge.schemas.execution import KillMatrix, TestOutcome, Verdict
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import (
    Diagnostic,
    MutantStatus,
    MutationPool,
    StatusKind,
    TokenUsage,
)


class TestSourceLocation:
    """Tests for SourceLocation validation."""

    @pytest.mark.smoke
    def test_valid_location(self):
        loc = SourceLocation(file="src/Calc.java", line_start=3, line_end=5)

        assert loc.line_count == 3, "Span 3-5 covers three lines"
        assert str(loc) == "src/Calc.java:3-5", f"Unexpected rendering {loc}"
        assert loc.contains_line(4), "Line 4 lies inside the span"

    @pytest.mark.parametrize(
        ("fields", "code"),
        [
            ({"file": "a.mini", "line_start": 0, "line_end": 1}, "LOCATION_SPAN"),
            ({"file": "a.mini", "line_start": 4, "line_end": 3}, "LOCATION_SPAN"),
            ({"file": "", "line_start": 1, "line_end": 1}, "LOCATION_FILE"),
            ({"file": "../a.mini", "line_start": 1, "line_end": 1}, "LOCATION_FILE"),
            ({"file": "/abs/a.mini", "line_start": 1, "line_end": 1}, "LOCATION_FILE"),
        ],
    )
    def test_invalid_locations(self, fields, code):
        with pytest.raises(ValidationError) as exc_info:
            SourceLocation(**fields)

        assert code in str(exc_info.value), f"Expected {code} in {exc_info.value}"

    def test_backslashes_are_normalized(self):
        loc = SourceLocation(file="src\\Calc.java", line_start=1, line_end=1)

        assert loc.file == "src/Calc.java", "Windows separators become POSIX"

    def test_strict_types(self):
        with pytest.raises(ValidationError):
            SourceLocation(file="a.mini", line_start="1", line_end=1)

    def test_overlaps_and_single_line(self):
        a = SourceLocation(file="a.mini", line_start=2, line_end=4)
        b = SourceLocation(file="a.mini", line_start=4, line_end=6)
        c = SourceLocation(file="b.mini", line_start=2, line_end=4)

        assert a.overlaps(b), "Spans sharing line 4 overlap"
        assert not a.overlaps(c), "Spans in different files never overlap"
        assert a.single_line(3) == SourceLocation(file="a.mini", line_start=3, line_end=3), "Line 3 of the span"
        with pytest.raises(ValueError):
            a.single_line(7)


class TestMutantStatus:
    """Tests for MutantStatus payload rules."""

    @pytest.mark.smoke
    def test_non_compilable_needs_diagnostics(self):
        with pytest.raises(ValidationError, match="MUTANT_STATUS"):
            MutantStatus(kind=StatusKind.NON_COMPILABLE)

    def test_duplicate_needs_reference(self):
        with pytest.raises(ValidationError, match="MUTANT_STATUS"):
            MutantStatus(kind=StatusKind.DUPLICATE)
        with pytest.raises(ValidationError, match="MUTANT_STATUS"):
            MutantStatus(kind=StatusKind.VIABLE, duplicate_of="m1")

    def test_constructors(self):
        diagnostic = Diagnostic(kind="unknown-function", message="cannot find symbol: method gsum")

        assert MutantStatus.non_compilable([diagnostic]).diagnostics == (diagnostic,), "Diagnostics kept"
        assert MutantStatus.duplicate("m1").duplicate_of == "m1", "Reference kept"
        assert MutantStatus.viable().kind is StatusKind.VIABLE, "Viable kind"

    def test_diagnostic_kind_required(self):
        with pytest.raises(ValidationError, match="DIAGNOSTIC_KIND"):
            Diagnostic(kind=" ", message="x")


class TestMutationRecord:
    """Tests for MutationRecord."""

    @pytest.mark.smoke
    def test_valid_record(self, make_record):
        record = make_record("m1", "x = a + b;", "x = a - b;")

        assert record.status is None, "New records are unclassified"
        assert record.status_kind is None, "No status kind before classification"

    def test_empty_id_rejected(self, make_record):
        with pytest.raises(ValidationError, match="REQUIRED_FIELDS"):
            make_record(" ", "a", "b")

    def test_with_status_copies(self, make_record):
        record = make_record("m1", "a;", "b;")
        classified = record.with_status(MutantStatus.viable())

        assert classified.status_kind is StatusKind.VIABLE, "Copy carries the status"
        assert record.status is None, "Original record is unchanged"

    def test_negative_wall_time_rejected(self, make_record):
        with pytest.raises(ValidationError):
            make_record("m1", "a;", "b;", gen_wall_time=-1.0)

    def test_token_usage_adds(self):
        total = TokenUsage(prompt_tokens=10, completion_tokens=3) + TokenUsage(prompt_tokens=5, completion_tokens=2)

        assert (total.prompt_tokens, total.completion_tokens) == (15, 5), f"Unexpected sum {total}"


class TestMutationPool:
    """Tests for MutationPool."""

    @pytest.mark.smoke
    def test_duplicate_ids_rejected(self, make_record, make_pool):
        with pytest.raises(ValidationError, match="POOL_UNIQUENESS"):
            make_pool([make_record("m1", "a;", "b;"), make_record("m1", "a;", "c;")])

    def test_views(self, make_record, make_pool):
        diagnostic = Diagnostic(kind="parse-error", message="calc.mini:1: expected ';'")
        pool = make_pool(
            [
                make_record("m1", "a;", "b;").with_status(MutantStatus.viable()),
                make_record("m2", "a;", "c").with_status(MutantStatus.non_compilable([diagnostic])),
                make_record("m3", "a;", "a;").with_status(MutantStatus.identical()),
                make_record("m4", "a;", "d;").with_status(MutantStatus.equivalent_labeled()),
            ]
        )

        assert pool.is_classified, "Every record carries a status"
        assert [r.id for r in pool.viable()] == ["m1", "m4"], "Labeled equivalents stay in C - U"
        assert [r.id for r in pool.with_kind(StatusKind.NON_COMPILABLE)] == ["m2"], "One failing record"
        assert set(pool.by_id()) == {"m1", "m2", "m3", "m4"}, "Index covers every record"

    def test_json_round_trip(self, make_record, make_pool):
        pool = make_pool([make_record("m1", "a;", "b;", line=3)])

        restored = MutationPool.model_validate_json(pool.model_dump_json())

        assert restored == pool, "Pools should survive JSON serialization"


class TestKillMatrix:
    """Tests for KillMatrix totality and killing sets."""

    def matrix(self, **overrides) -> KillMatrix:
        fields = {
            "mutant_ids": ("m1", "m2"),
            "test_ids": ("t1", "t2", "t3"),
            "cells": {
                "m1": {"t1": Verdict.FAIL, "t2": Verdict.PASS, "t3": Verdict.NOT_RUN},
                "m2": {"t1": Verdict.PASS, "t2": Verdict.TIMEOUT, "t3": Verdict.NOT_RUN},
            },
            "baseline": {"t1": Verdict.PASS, "t2": Verdict.PASS, "t3": Verdict.FAIL},
        }
        fields.update(overrides)
        return KillMatrix(**fields)

    @pytest.mark.smoke
    def test_killing_tests(self):
        matrix = self.matrix()

        assert matrix.killing_tests("m1") == {"t1"}, "Fail on a passing baseline test kills"
        assert matrix.killing_tests("m2") == {"t2"}, "Timeout kills"
        assert matrix.signal_tests == ("t1", "t2"), "Only baseline-passing tests carry signal"

    def test_missing_cell_rejected(self):
        with pytest.raises(ValidationError, match="KILL_MATRIX"):
            self.matrix(cells={"m1": {"t1": Verdict.PASS}, "m2": {}})

    def test_missing_baseline_rejected(self):
        with pytest.raises(ValidationError, match="KILL_MATRIX"):
            self.matrix(baseline={"t1": Verdict.PASS})

    def test_subset_and_restriction(self):
        matrix = self.matrix()

        assert matrix.subset(["m2"]).mutant_ids == ("m2",), "Subset keeps the given rows"
        restricted = matrix.restricted_to({"t1"})
        assert restricted.test_ids == ("t1",), "Restriction keeps the given columns"
        assert not restricted.is_killed("m2"), "m2 is only killed by t2"

    def test_outcome_cannot_be_not_run(self):
        with pytest.raises(ValidationError, match="TEST_OUTCOME"):
            TestOutcome(test_id="t1", verdict=Verdict.NOT_RUN)


class TestErrors:
    """Tests for the error payloads."""

    @pytest.mark.smoke
    def test_to_dict(self):
        error = FixtureInvalidError("triggering tests pass on the buggy version", bug="bug-007")

        payload = error.to_dict()

        assert payload["error"] == "FIXTURE_INVALID", f"Unexpected code {payload}"
        assert payload["context"] == {"bug": "bug-007"}, "Context should be carried"
        assert isinstance(error, MutforgeError), "All errors share one base"

    def test_context_is_optional(self):
        assert "context" not in IntegrityError("bad").to_dict(), "Empty context is omitted"
