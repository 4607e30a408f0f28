"""
Generators: one column of the experiment grid each.

Both kinds turn a bug case's target window into an unclassified
MutationPool. Record ids are ``<bug>/<generator>/<nnnn>``. LLM records split
their request's wall time evenly and its token usage by integer division,
the first records taking the remainder, so per-record sums equal the
request totals.
"""

import logging
import time
from abc import ABC, abstractmethod

from mutforge.config import ExperimentConfig, GeneratorConfig
from mutforge.llmgen.backends import ChatBackend, GenerationResult, create_backend, request_mutations
from mutforge.llmgen.prompts import (
    DEFAULT_EXAMPLES,
    FewShotExample,
    PromptRequest,
    PromptTemplateId,
    budget_for,
    build_prompt,
    load_examples,
    select_examples,
)
from mutforge.rulegen.operators import RuleOperator, enumerate_rule_mutants, line_substitutions, parse_operators
from mutforge.schemas.bug_case import BugCase
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import GenerationSummary, MutationPool, MutationRecord, TokenUsage
from mutforge.study.context import TargetWindow
from mutforge.syntax.parser import parse_mini

logger = logging.getLogger(__name__)


class Generator(ABC):
    """A named mutation source."""

    def __init__(self, generator_id: str) -> None:
        self.id = generator_id

    def record_id(self, bug: BugCase, index: int) -> str:
        return f"{bug.id}/{self.id}/{index:04d}"

    @abstractmethod
    def generate(self, bug: BugCase, window: TargetWindow) -> MutationPool:
        """Unclassified pool of mutants inside ``window``."""


class RuleGenerator(Generator):
    """
    Args:
        generator_id: Column name.
        operators: Operators to apply.
    """

    def __init__(self, generator_id: str, operators: frozenset[RuleOperator]) -> None:
        super().__init__(generator_id)
        self.operators = operators

    def _line_records(self, bug: BugCase, window: TargetWindow) -> list[MutationRecord]:
        records: list[MutationRecord] = []
        for offset, line in enumerate(window.target.split("\n")):
            number = window.location.line_start + offset
            for mutated in line_substitutions(line, self.operators):
                records.append(
                    MutationRecord(
                        id=self.record_id(bug, len(records) + 1),
                        origin="rule:line",
                        location=window.location.single_line(number),
                        original_text=line,
                        mutated_text=mutated,
                    )
                )
        return records

    def generate(self, bug: BugCase, window: TargetWindow) -> MutationPool:
        started = time.monotonic()
        if window.tree:
            tree = parse_mini(bug.fixed_source.read(window.location.file))
            records = enumerate_rule_mutants(tree, self.operators, window.location, f"{bug.id}/{self.id}")
        else:
            records = self._line_records(bug, window)
        wall_time = time.monotonic() - started
        share = wall_time / len(records) if records else 0.0
        records = [r.model_copy(update={"gen_wall_time": share}) for r in records]
        return MutationPool(
            records=tuple(records),
            project_id=bug.id,
            generator_id=self.id,
            generations=(GenerationSummary(wall_time=wall_time, candidates=len(records)),),
        )


def split_usage(usage: TokenUsage, parts: int) -> list[TokenUsage]:
    """Usage split into ``parts`` shares that sum back to ``usage``."""
    prompt_base, prompt_rest = divmod(usage.prompt_tokens, parts)
    completion_base, completion_rest = divmod(usage.completion_tokens, parts)
    return [
        TokenUsage(
            prompt_tokens=prompt_base + (1 if i < prompt_rest else 0),
            completion_tokens=completion_base + (1 if i < completion_rest else 0),
        )
        for i in range(parts)
    ]


class LlmGenerator(Generator):
    """
    Args:
        generator_id: Column name.
        backend: Chat backend.
        template: Prompt template.
        examples: Few-shot pairs.
    """

    def __init__(
        self,
        generator_id: str,
        backend: ChatBackend,
        template: PromptTemplateId,
        examples: tuple[FewShotExample, ...] = DEFAULT_EXAMPLES,
    ) -> None:
        super().__init__(generator_id)
        self.backend = backend
        self.template = template
        self.examples = examples

    def prompt_for(self, window: TargetWindow) -> str:
        request = PromptRequest(
            template=self.template,
            target=window.target,
            location=window.location,
            enclosing_function=window.enclosing_function,
            unit_tests=window.unit_tests,
            examples=self.examples,
            budget=budget_for(window.target),
        )
        return build_prompt(request)

    def records_from(self, bug: BugCase, result: GenerationResult) -> list[MutationRecord]:
        if not result.candidates:
            return []
        fixed = bug.fixed_source.read(bug.bug_location.file).split("\n")
        count = len(result.candidates)
        usages = split_usage(result.usage, count)
        records: list[MutationRecord] = []
        for index, (location, code) in enumerate(result.candidates):
            records.append(
                MutationRecord(
                    id=self.record_id(bug, index + 1),
                    origin=f"{self.backend.id}:{self.template}",
                    location=location,
                    original_text=_span_text(fixed, location),
                    mutated_text=code,
                    gen_wall_time=result.wall_time / count,
                    token_usage=usages[index],
                )
            )
        return records

    def generate(self, bug: BugCase, window: TargetWindow) -> MutationPool:
        result = request_mutations(self.backend, self.prompt_for(window), window.location)
        records = self.records_from(bug, result)
        logger.info(
            "LLM pool generated",
            extra={
                "extra_fields": {
                    "bug_id": bug.id,
                    "generator": self.id,
                    "records": len(records),
                    "skipped": result.skipped,
                    "parse_failed": result.parse_failed,
                }
            },
        )
        return MutationPool(
            records=tuple(records),
            project_id=bug.id,
            generator_id=self.id,
            generations=(result.summary(),),
        )


def _span_text(lines: list[str], location: SourceLocation) -> str:
    return "\n".join(lines[location.line_start - 1:location.line_end])


def build_generators(
    cfg: ExperimentConfig,
    api_key: str | None = None,
    backends: dict[str, ChatBackend] | None = None,
) -> list[Generator]:
    """
    Generators for every configured column.

    Args:
        cfg: Run configuration.
        api_key: Key for http-chat backends.
        backends: Backend instances by id, overriding the configured ones.
    """
    instances = dict(backends or {})
    generators: list[Generator] = []
    for spec in cfg.generators:
        generators.append(_build_one(cfg, spec, api_key, instances))
    return generators


def _build_one(
    cfg: ExperimentConfig,
    spec: GeneratorConfig,
    api_key: str | None,
    instances: dict[str, ChatBackend],
) -> Generator:
    if spec.kind == "rule":
        return RuleGenerator(spec.id, parse_operators(spec.operators))
    backend_id = spec.backend or ""
    if backend_id not in instances:
        instances[backend_id] = create_backend(cfg.backend(backend_id), api_key)
    examples = load_examples(spec.examples_file, spec.examples_limit) if spec.examples_file else None
    if examples is None:
        examples = select_examples(DEFAULT_EXAMPLES, spec.examples_limit)
    return LlmGenerator(spec.id, instances[backend_id], PromptTemplateId(spec.prompt), examples)
