"""
LLM mutation generation.

This module exports:
- PromptTemplateId, FewShotExample, PromptRequest: prompt inputs
- DEFAULT_EXAMPLES: the default few-shot pairs
- budget_for, build_prompt, load_examples: prompt construction
- ChatBackend, HttpChatBackend, StubBackend, create_backend: chat backends
- GenerationResult, request_mutations: one backend round trip
- parse_response: candidate extraction from a model answer
- CostReport, cost_of: AGT and dollars per 1K mutations

Example:
    >>> from mutforge.llmgen import StubBackend, build_prompt, request_mutations
"""

from mutforge.llmgen.backends import (
    BackendDescriptor,
    ChatBackend,
    GenerationResult,
    HttpChatBackend,
    StubBackend,
    create_backend,
    request_mutations,
)
from mutforge.llmgen.cost import CostReport, cost_of, token_cost
from mutforge.llmgen.parsing import ParsedResponse, first_json_array, parse_response
from mutforge.llmgen.prompts import (
    DEFAULT_EXAMPLES,
    FewShotExample,
    PromptRequest,
    PromptTemplateId,
    budget_for,
    build_prompt,
    context_block,
    load_examples,
    select_examples,
)

__all__ = [
    "BackendDescriptor",
    "ChatBackend",
    "CostReport",
    "DEFAULT_EXAMPLES",
    "FewShotExample",
    "GenerationResult",
    "HttpChatBackend",
    "ParsedResponse",
    "PromptRequest",
    "PromptTemplateId",
    "StubBackend",
    "budget_for",
    "build_prompt",
    "context_block",
    "cost_of",
    "create_backend",
    "first_json_array",
    "load_examples",
    "parse_response",
    "request_mutations",
    "select_examples",
    "token_cost",
]
