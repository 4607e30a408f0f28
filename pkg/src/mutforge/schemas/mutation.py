"""
Mutation schemas for mutforge.

This module defines the records that flow through the pipeline:

- Diagnostic: one toolchain complaint about a mutant
- MutantStatus: the filter verdict attached to a record by classification
- MutationRecord: one candidate mutation (a member of the generated set A)
- GenerationSummary: cost bookkeeping for one backend request
- MutationPool: every record produced by one generator for one project

Set algebra over a classified pool:
    A = all records
    C = records whose status is not NonCompilable
    U = IdenticalToOriginal + Duplicate   (U is a subset of C)
    viable = C - U                         (EquivalentLabeled records stay in viable)

Example Usage:
    >>> from mutforge.schemas import MutationPool, MutationRecord, SourceLocation
    >>> record = MutationRecord(
    ...     id="bug-001/rule/0001",
    ...     origin="rule:AOR",
    ...     location=SourceLocation(file="calc.mini", line_start=3, line_end=3),
    ...     original_text="  let s = a + b;",
    ...     mutated_text="  let s = a - b;",
    ... )
    >>> pool = MutationPool(records=[record], project_id="bug-001", generator_id="rule")
"""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mutforge.schemas.location import SourceLocation


class Diagnostic(BaseModel):
    """
    One complaint from a toolchain check.

    Attributes:
        kind: Adapter-specific code such as ``unknown-function`` or ``parse-error``.
        message: Human-readable text, preserved verbatim.
        location: Where the toolchain located the problem.
    """

    model_config = ConfigDict(frozen=True)

    kind: str = Field(..., description="Adapter-specific diagnostic code", examples=["unknown-function"])
    message: str = Field(..., description="Diagnostic text as emitted by the toolchain")
    location: SourceLocation | None = Field(default=None, description="Reported location")

    @field_validator("kind")
    @classmethod
    def validate_kind(cls, v: str) -> str:
        if not v or not v.strip():
            raise ValueError("DIAGNOSTIC_KIND: kind cannot be empty")
        return v


class StatusKind(StrEnum):
    """Filter verdicts, in classification precedence order."""

    IDENTICAL = "IdenticalToOriginal"
    NON_COMPILABLE = "NonCompilable"
    DUPLICATE = "Duplicate"
    VIABLE = "Viable"
    EQUIVALENT_LABELED = "EquivalentLabeled"


USELESS_KINDS = frozenset({StatusKind.IDENTICAL, StatusKind.DUPLICATE})
VIABLE_KINDS = frozenset({StatusKind.VIABLE, StatusKind.EQUIVALENT_LABELED})


class MutantStatus(BaseModel):
    """
    Classification result for one record.

    Attributes:
        kind: The verdict.
        diagnostics: Compile diagnostics (NonCompilable only).
        duplicate_of: Id of the earlier Viable record (Duplicate only).
    """

    model_config = ConfigDict(frozen=True)

    kind: StatusKind
    diagnostics: tuple[Diagnostic, ...] = ()
    duplicate_of: str | None = None

    @model_validator(mode="after")
    def validate_payload(self) -> "MutantStatus":
        if self.kind is StatusKind.NON_COMPILABLE and not self.diagnostics:
            raise ValueError("MUTANT_STATUS: NonCompilable requires at least one diagnostic")
        if self.kind is not StatusKind.NON_COMPILABLE and self.diagnostics:
            raise ValueError(f"MUTANT_STATUS: {self.kind} cannot carry diagnostics")
        if (self.kind is StatusKind.DUPLICATE) != (self.duplicate_of is not None):
            raise ValueError("MUTANT_STATUS: duplicate_of is set exactly for Duplicate")
        return self

    @classmethod
    def identical(cls) -> "MutantStatus":
        return cls(kind=StatusKind.IDENTICAL)

    @classmethod
    def non_compilable(cls, diagnostics: list[Diagnostic] | tuple[Diagnostic, ...]) -> "MutantStatus":
        return cls(kind=StatusKind.NON_COMPILABLE, diagnostics=tuple(diagnostics))

    @classmethod
    def duplicate(cls, of: str) -> "MutantStatus":
        return cls(kind=StatusKind.DUPLICATE, duplicate_of=of)

    @classmethod
    def viable(cls) -> "MutantStatus":
        return cls(kind=StatusKind.VIABLE)

    @classmethod
    def equivalent_labeled(cls) -> "MutantStatus":
        return cls(kind=StatusKind.EQUIVALENT_LABELED)


class TokenUsage(BaseModel):
    """Prompt/completion token counts reported by a chat backend."""

    model_config = ConfigDict(frozen=True)

    prompt_tokens: int = Field(default=0, ge=0)
    completion_tokens: int = Field(default=0, ge=0)

    def __add__(self, other: "TokenUsage") -> "TokenUsage":
        return TokenUsage(
            prompt_tokens=self.prompt_tokens + other.prompt_tokens,
            completion_tokens=self.completion_tokens + other.completion_tokens,
        )


class MutationRecord(BaseModel):
    """
    One candidate mutation.

    Attributes:
        id: Opaque identifier, unique within its pool.
        origin: Generator tag, ``<backend>:<prompt>`` for LLM output or ``rule:<OP>``.
        location: Line span the mutation replaces.
        original_text: The project text of that span (lines joined with ``\\n``).
        mutated_text: Replacement text for the span.
        status: Filter verdict, None until classified.
        gen_wall_time: Seconds attributed to producing this record.
        token_usage: Share of the backend usage, absent for rule generators.
    """

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Identifier unique within the pool")
    origin: str = Field(..., description="Generator tag", examples=["stub:P1", "rule:AOR"])
    location: SourceLocation
    original_text: str
    mutated_text: str
    status: MutantStatus | None = None
    gen_wall_time: float = Field(default=0.0, ge=0.0)
    token_usage: TokenUsage | None = None

    @field_validator("id", "origin")
    @classmethod
    def validate_non_empty(cls, v: str) -> str:
        if not v or not v.strip():
            raise ValueError("REQUIRED_FIELDS: id and origin cannot be empty")
        return v

    @property
    def status_kind(self) -> StatusKind | None:
        return self.status.kind if self.status is not None else None

    def with_status(self, status: MutantStatus) -> "MutationRecord":
        return self.model_copy(update={"status": status})


class GenerationSummary(BaseModel):
    """
    Bookkeeping for one generator invocation (one prompt or one rule enumeration).

    Attributes:
        wall_time: Seconds spent waiting for the generator.
        usage: Token usage, absent for rule generators.
        candidates: Number of candidates the invocation produced.
        skipped: Malformed response elements that were dropped.
        parse_failed: True when no JSON array could be found in the response.
    """

    model_config = ConfigDict(frozen=True)

    wall_time: float = Field(default=0.0, ge=0.0)
    usage: TokenUsage | None = None
    candidates: int = Field(default=0, ge=0)
    skipped: int = Field(default=0, ge=0)
    parse_failed: bool = False


class MutationPool(BaseModel):
    """
    All records produced by one generator for one project.

    Attributes:
        records: Records in generation order (order drives first-occurrence rules).
        project_id: Bug case or project identifier.
        generator_id: Generator identifier from the run configuration.
        generations: One summary per generator invocation.
    """

    model_config = ConfigDict(frozen=True)

    records: tuple[MutationRecord, ...] = ()
    project_id: str
    generator_id: str
    generations: tuple[GenerationSummary, ...] = ()

    @model_validator(mode="after")
    def validate_unique_ids(self) -> "MutationPool":
        seen: set[str] = set()
        for record in self.records:
            if record.id in seen:
                raise ValueError(f"POOL_UNIQUENESS: duplicate record id '{record.id}'")
            seen.add(record.id)
        return self

    @property
    def is_classified(self) -> bool:
        return all(r.status is not None for r in self.records)

    def by_id(self) -> dict[str, MutationRecord]:
        return {r.id: r for r in self.records}

    def with_kind(self, *kinds: StatusKind) -> list[MutationRecord]:
        wanted = set(kinds)
        return [r for r in self.records if r.status_kind in wanted]

    def viable(self) -> list[MutationRecord]:
        """Records in C - U (labeled equivalents included)."""
        return [r for r in self.records if r.status_kind in VIABLE_KINDS]

    def replace_records(self, records: list[MutationRecord]) -> "MutationPool":
        return self.model_copy(update={"records": tuple(records)})
