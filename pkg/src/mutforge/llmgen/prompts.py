"""
Prompt construction for LLM mutation generation.

Every prompt has four sections, in order:

    ## Instruction        mutation-testing framing and the task (mutants of the target element)
    ## Context            template-dependent material
    ## Input Data         numbered target lines and the mutant count
    ## Output Indicator   the JSON answer format

Context material per template:

    P1  enclosing function + few-shot example pairs (the default)
    P2  enclosing function
    P3  nothing beyond a note that the target element stands alone
    P4  P1 + unit-test source

The context blocks of P2, P1 and P4 nest: each is a prefix of the next.

Example Usage:
    >>> from mutforge.llmgen.prompts import PromptRequest, PromptTemplateId, build_prompt
    >>> request = PromptRequest(
    ...     template=PromptTemplateId.P2,
    ...     target="  let s = a + b;\\n  return s;",
    ...     location=SourceLocation(file="calc.mini", line_start=3, line_end=4),
    ...     enclosing_function=function_text,
    ...     budget=2,
    ... )
    >>> prompt = build_prompt(request)
"""

import json
import logging
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from mutforge.errors import BudgetError, ConfigError, PromptFieldError
from mutforge.schemas.location import SourceLocation

logger = logging.getLogger(__name__)

INSTRUCTION_HEADER = "## Instruction"
CONTEXT_HEADER = "## Context"
INPUT_HEADER = "## Input Data"
OUTPUT_HEADER = "## Output Indicator"


class PromptTemplateId(StrEnum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"


class FewShotExample(BaseModel):
    """A real bug: the developer-fixed code and the buggy code."""

    model_config = ConfigDict(frozen=True)

    correct: str = Field(..., description="Correct version")
    buggy: str = Field(..., description="Buggy version")

    @model_validator(mode="after")
    def validate_pair(self) -> "FewShotExample":
        if not self.correct.strip() or not self.buggy.strip():
            raise ValueError("FEW_SHOT: correct and buggy must be non-empty")
        if self.correct == self.buggy:
            raise ValueError("FEW_SHOT: correct and buggy versions must differ")
        return self


DEFAULT_EXAMPLES: tuple[FewShotExample, ...] = (
    FewShotExample(correct="n = (n & (n - 1));", buggy="n = (n ^ (n - 1));"),
    FewShotExample(correct="while (!queue.isEmpty())", buggy="while (true)"),
    FewShotExample(correct="return depth==0;", buggy="return true;"),
    FewShotExample(
        correct="ArrayList r = new ArrayList();\nr.add(first).addll(subset);\nto_add(r);",
        buggy="to_add.addAll(subset);",
    ),
    FewShotExample(correct="c = bin_op.apply(b,a);", buggy="c = bin_op.apply(a,b);"),
    FewShotExample(
        correct="while(Math.abs(x-approx*approx)>epsilon)",
        buggy="while(Math.abs(x-approx)>epsilon)",
    ),
)

INSTRUCTION = (
    "Mutation testing evaluates a test suite by injecting small faults, called mutants, "
    "into a program and checking whether the tests detect them. A good mutant resembles "
    "a mistake a developer could really make.\n\n"
    "Generate mutants for the target code element given under Input Data. "
    "Each mutant changes exactly one of the numbered lines."
)
STANDALONE_NOTE = "The target code element is shown without its surrounding code."

_NEEDS_FUNCTION = frozenset({PromptTemplateId.P1, PromptTemplateId.P2, PromptTemplateId.P4})
_NEEDS_EXAMPLES = frozenset({PromptTemplateId.P1, PromptTemplateId.P4})


class PromptRequest(BaseModel):
    """
    Everything a prompt is built from.

    Attributes:
        template: Prompt template.
        target: Target lines, exactly the lines of ``location``.
        location: Where the target lies.
        enclosing_function: Source of the surrounding function (P1, P2, P4).
        unit_tests: Source of the tests exercising the function (P4).
        examples: Few-shot pairs (P1, P4).
        budget: Number of mutants to request.
    """

    model_config = ConfigDict(frozen=True)

    template: PromptTemplateId
    target: str
    location: SourceLocation
    enclosing_function: str | None = None
    unit_tests: str | None = None
    examples: tuple[FewShotExample, ...] = ()
    budget: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_target_lines(self) -> "PromptRequest":
        line_count = len(self.target.split("\n"))
        if line_count != self.location.line_count:
            raise ValueError(
                f"PROMPT_TARGET: target has {line_count} lines, location spans {self.location.line_count}"
            )
        return self


def budget_for(target: str) -> int:
    """
    One mutant per non-blank target line.

    Raises:
        BudgetError: If every line is blank.
    """
    count = sum(1 for line in target.split("\n") if line.strip())
    if count == 0:
        raise BudgetError("target excerpt has no non-blank lines")
    return count


def load_examples(path: Path, limit: int | None = None) -> tuple[FewShotExample, ...]:
    """
    Few-shot pairs from a JSON list of ``{"correct": ..., "buggy": ...}``.

    Raises:
        ConfigError: If the file is unreadable or malformed.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load few-shot examples from {path}: {exc}", file=str(path)) from exc
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected a JSON list of example objects", file=str(path))
    try:
        examples = tuple(FewShotExample.model_validate(item) for item in data)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc.errors()[0]['msg']}", file=str(path)) from exc
    return select_examples(examples, limit)


def select_examples(
    examples: tuple[FewShotExample, ...] = DEFAULT_EXAMPLES,
    limit: int | None = None,
) -> tuple[FewShotExample, ...]:
    return examples if limit is None else examples[:limit]


def check_fields(req: PromptRequest) -> None:
    """
    Raises:
        PromptFieldError: Naming the first field the template needs but lacks.
    """
    if req.template in _NEEDS_FUNCTION and not (req.enclosing_function or "").strip():
        raise PromptFieldError(f"template {req.template} requires enclosing_function", field="enclosing_function")
    if req.template in _NEEDS_EXAMPLES and not req.examples:
        raise PromptFieldError(f"template {req.template} requires examples", field="examples")
    if req.template is PromptTemplateId.P4 and not (req.unit_tests or "").strip():
        raise PromptFieldError("template P4 requires unit_tests", field="unit_tests")


def _fenced(code: str) -> str:
    return f"```\n{code.rstrip()}\n```"


def context_block(req: PromptRequest) -> str:
    """The Context section body for the request's template."""
    if req.template is PromptTemplateId.P3:
        return STANDALONE_NOTE
    parts: list[str] = []
    if req.template in _NEEDS_FUNCTION:
        parts.append(f"The target code element is part of this function:\n{_fenced(req.enclosing_function or '')}")
    if req.template in _NEEDS_EXAMPLES:
        pairs = [
            f"Example {index}:\nCorrect version:\n{_fenced(example.correct)}\nBuggy version:\n{_fenced(example.buggy)}"
            for index, example in enumerate(req.examples, start=1)
        ]
        parts.append("Real bugs from another project, each shown as its correct and buggy version:\n\n" + "\n\n".join(pairs))
    if req.template is PromptTemplateId.P4:
        parts.append(f"These unit tests exercise the function:\n{_fenced(req.unit_tests or '')}")
    return "\n\n".join(parts)


def numbered_target(req: PromptRequest) -> str:
    lines = req.target.split("\n")
    return "\n".join(f"{req.location.line_start + i}: {line}" for i, line in enumerate(lines))


def build_prompt(req: PromptRequest) -> str:
    """
    Render the prompt text.

    Raises:
        PromptFieldError: If the template lacks a required field.
    """
    check_fields(req)
    sections = [
        INSTRUCTION_HEADER,
        INSTRUCTION,
        CONTEXT_HEADER,
        context_block(req),
        INPUT_HEADER,
        f"Target code element ({req.location.file}, lines {req.location.line_start}-{req.location.line_end}):",
        numbered_target(req),
        f"Generate {req.budget} mutants.",
        OUTPUT_HEADER,
        'Answer with a JSON array. Each element is an object {"line": <line number>, '
        '"mutated_code": "<the full mutated line>"}. Use only the line numbers shown above.',
    ]
    prompt = "\n".join(sections) + "\n"
    logger.debug(
        "Prompt built",
        extra={
            "extra_fields": {
                "template": str(req.template),
                "location": str(req.location),
                "budget": req.budget,
                "examples": len(req.examples),
            }
        },
    )
    return prompt
