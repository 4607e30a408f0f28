"""
Source location schema.

A SourceLocation names an inclusive, 1-based line span inside one file of a
project snapshot. File paths are always relative to the snapshot root and may
not climb out of it.

Example Usage:
    >>> from mutforge.schemas.location import SourceLocation
    >>> loc = SourceLocation(file="calc.mini", line_start=3, line_end=3)
    >>> loc.contains_line(3)
    True
"""

from pathlib import PurePosixPath

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SourceLocation(BaseModel):
    """
    Inclusive line span inside a project file.

    Attributes:
        file: Path relative to the project root, POSIX separators, no ``..``.
        line_start: First line of the span (1-based).
        line_end: Last line of the span (1-based, inclusive).
    """

    model_config = ConfigDict(frozen=True, strict=True)

    file: str = Field(..., description="Relative path inside the project", examples=["calc.mini"])
    line_start: int = Field(..., description="1-based first line", examples=[12])
    line_end: int = Field(..., description="1-based last line (inclusive)", examples=[14])

    @field_validator("file")
    @classmethod
    def validate_file(cls, v: str) -> str:
        """
        Validate the relative path.

        Rules:
            - Must be non-empty
            - Must be relative
            - Must not contain parent-directory segments

        Raises:
            ValueError: If the path breaks any rule.
        """
        if not v or not v.strip():
            raise ValueError("LOCATION_FILE: file cannot be empty")
        normalized = v.replace("\\", "/")
        path = PurePosixPath(normalized)
        if path.is_absolute():
            raise ValueError(f"LOCATION_FILE: file must be relative, got '{v}'")
        if ".." in path.parts:
            raise ValueError(f"LOCATION_FILE: file cannot contain '..' segments, got '{v}'")
        return normalized

    @model_validator(mode="after")
    def validate_span(self) -> "SourceLocation":
        if self.line_start < 1:
            raise ValueError(f"LOCATION_SPAN: line_start must be >= 1, got {self.line_start}")
        if self.line_end < self.line_start:
            raise ValueError(
                f"LOCATION_SPAN: line_end ({self.line_end}) must be >= line_start ({self.line_start})"
            )
        return self

    @property
    def line_count(self) -> int:
        return self.line_end - self.line_start + 1

    def contains_line(self, line: int) -> bool:
        return self.line_start <= line <= self.line_end

    def overlaps(self, other: "SourceLocation") -> bool:
        return (
            self.file == other.file
            and self.line_start <= other.line_end
            and other.line_start <= self.line_end
        )

    def single_line(self, line: int) -> "SourceLocation":
        """Location of one line of this span (same file)."""
        if not self.contains_line(line):
            raise ValueError(f"LOCATION_SPAN: line {line} outside {self}")
        return SourceLocation(file=self.file, line_start=line, line_end=line)

    def __str__(self) -> str:
        return f"{self.file}:{self.line_start}-{self.line_end}"
