"""
Exception hierarchy for mutforge.

Every error raised by the pipeline derives from MutforgeError and carries an
upper-case code that also prefixes its message, e.g.
``STALE_SOURCE: src/a.mini:3-3 does not match the recorded original text``.
The CLI uses the code for its machine-readable error output.
"""

from typing import Any


class MutforgeError(Exception):
    """Base class for all mutforge errors."""

    code = "MUTFORGE"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(f"{self.code}: {message}")
        self.detail = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form used by the CLI's --verbose error output."""
        return {
            "error": self.code,
            "type": type(self).__name__,
            "message": self.detail,
            **({"context": self.context} if self.context else {}),
        }


class IntegrityError(MutforgeError):
    """Pool/matrix bookkeeping is inconsistent (unknown ids, unclassified pool)."""

    code = "INTEGRITY"


class StaleSourceError(MutforgeError):
    """The project file no longer matches a mutation's recorded original text."""

    code = "STALE_SOURCE"


class LexicalError(MutforgeError):
    """The tokenizer met input it cannot split into tokens."""

    code = "LEXICAL"

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at {line}:{column}", line=line, column=column)
        self.line = line
        self.column = column


class ParseError(MutforgeError):
    """MiniLang source does not follow the grammar."""

    code = "PARSE"

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at {line}:{column}", line=line, column=column)
        self.line = line
        self.column = column


class PromptFieldError(MutforgeError):
    """A prompt template is missing a field it requires."""

    code = "PROMPT_FIELD"


class BudgetError(MutforgeError):
    """No mutation budget can be derived from the target."""

    code = "BUDGET"


class TransportError(MutforgeError):
    """The LLM backend could not be reached after all retries."""

    code = "TRANSPORT"


class ProtocolError(MutforgeError):
    """The LLM backend answered with an envelope we cannot read."""

    code = "PROTOCOL"


class CostError(MutforgeError):
    """Cost metrics are undefined (no candidates produced)."""

    code = "COST"


class MetricError(MutforgeError):
    """A metric is undefined for its inputs."""

    code = "METRIC"


class FixtureInvalidError(MutforgeError):
    """A bug case on disk violates the bug-case contract."""

    code = "FIXTURE_INVALID"


class FlakyBaselineError(MutforgeError):
    """A test gave different verdicts on two runs of the unmutated project."""

    code = "FLAKY_BASELINE"


class ConfigError(MutforgeError):
    """A run configuration file is unreadable or invalid."""

    code = "CONFIG"
