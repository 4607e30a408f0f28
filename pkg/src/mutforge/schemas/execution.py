"""
Test execution schemas for mutforge.

- Verdict: outcome of one test on one program version
- TestOutcome: a verdict with its test id and wall time
- KillMatrix: verdicts of every test against every viable mutant plus the
  unmutated baseline; derives the killing tests of each mutant

A test t kills mutant M when baseline[t] is Pass and cells[M][t] is one of
Fail, Timeout or Crash.
"""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Verdict(StrEnum):
    """Test verdicts; the value is the single-letter CSV code."""

    PASS = "P"
    FAIL = "F"
    TIMEOUT = "T"
    CRASH = "C"
    NOT_RUN = "N"


KILLING_VERDICTS = frozenset({Verdict.FAIL, Verdict.TIMEOUT, Verdict.CRASH})


class TestOutcome(BaseModel):
    """
    Result of running one test.

    Attributes:
        test_id: Test identifier.
        verdict: Pass, Fail, Timeout or Crash.
        wall_time: Seconds the test ran.
        detail: Optional failure text (crash message, timeout budget).
    """

    __test__ = False  # not a pytest class

    model_config = ConfigDict(frozen=True)

    test_id: str
    verdict: Verdict
    wall_time: float = Field(default=0.0, ge=0.0)
    detail: str = ""

    @model_validator(mode="after")
    def validate_verdict(self) -> "TestOutcome":
        if self.verdict is Verdict.NOT_RUN:
            raise ValueError("TEST_OUTCOME: an executed test cannot be NotRun")
        return self


class KillMatrix(BaseModel):
    """
    Per-mutant, per-test verdicts.

    Attributes:
        mutant_ids: Row order.
        test_ids: Column order (every scheduled test, baseline failures included).
        cells: mutant id -> test id -> verdict; NotRun marks skipped pairs.
        baseline: test id -> verdict on the unmutated program.

    Example:
        >>> m = KillMatrix(
        ...     mutant_ids=["m1"], test_ids=["t1"],
        ...     cells={"m1": {"t1": Verdict.FAIL}}, baseline={"t1": Verdict.PASS},
        ... )
        >>> m.killing_tests("m1")
        frozenset({'t1'})
    """

    model_config = ConfigDict(frozen=True)

    mutant_ids: tuple[str, ...] = ()
    test_ids: tuple[str, ...] = ()
    cells: dict[str, dict[str, Verdict]] = Field(default_factory=dict)
    baseline: dict[str, Verdict] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_totality(self) -> "KillMatrix":
        if len(set(self.mutant_ids)) != len(self.mutant_ids):
            raise ValueError("KILL_MATRIX: duplicate mutant ids")
        if len(set(self.test_ids)) != len(self.test_ids):
            raise ValueError("KILL_MATRIX: duplicate test ids")
        missing_baseline = [t for t in self.test_ids if t not in self.baseline]
        if missing_baseline:
            raise ValueError(f"KILL_MATRIX: no baseline verdict for {missing_baseline[:10]}")
        for mutant_id in self.mutant_ids:
            row = self.cells.get(mutant_id)
            if row is None:
                raise ValueError(f"KILL_MATRIX: no row for mutant '{mutant_id}'")
            missing = [t for t in self.test_ids if t not in row]
            if missing:
                raise ValueError(
                    f"KILL_MATRIX: mutant '{mutant_id}' has no verdict for {missing[:10]}"
                )
        return self

    @property
    def signal_tests(self) -> tuple[str, ...]:
        """Tests that pass on the baseline and can therefore kill."""
        return tuple(t for t in self.test_ids if self.baseline[t] is Verdict.PASS)

    def killing_tests(self, mutant_id: str) -> frozenset[str]:
        """Baseline-passing tests that fail, time out or crash on the mutant."""
        row = self.cells[mutant_id]
        return frozenset(
            t
            for t in self.test_ids
            if self.baseline[t] is Verdict.PASS and row[t] in KILLING_VERDICTS
        )

    def is_killed(self, mutant_id: str) -> bool:
        return bool(self.killing_tests(mutant_id))

    def restricted_to(self, test_ids: set[str] | frozenset[str]) -> "KillMatrix":
        """Same matrix with only the given tests (used for monotonicity checks)."""
        kept = tuple(t for t in self.test_ids if t in test_ids)
        return KillMatrix(
            mutant_ids=self.mutant_ids,
            test_ids=kept,
            cells={m: {t: row[t] for t in kept} for m, row in self.cells.items()},
            baseline={t: self.baseline[t] for t in kept},
        )

    def subset(self, mutant_ids: list[str]) -> "KillMatrix":
        """Rows of the given mutants only, in the given order."""
        return KillMatrix(
            mutant_ids=tuple(mutant_ids),
            test_ids=self.test_ids,
            cells={m: dict(self.cells[m]) for m in mutant_ids},
            baseline=dict(self.baseline),
        )
