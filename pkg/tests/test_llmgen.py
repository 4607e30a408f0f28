"""
Pytest test suite for LLM mutation generation.

Tests cover:
- Prompt templates P1-P4 and their required fields
- Response parsing
- HTTP backend retries and envelope errors (requests is monkeypatched)
- The offline stub backend
- Cost metrics
"""

import json

import pytest
import requests

from mutforge.config import BackendConfig
from mutforge.errors import BudgetError, CostError, PromptFieldError, ProtocolError, TransportError
from mutforge.llmgen import backends
from mutforge.llmgen.backends import HttpChatBackend, StubBackend, create_backend, request_mutations
from mutforge.llmgen.cost import cost_of, token_cost
from mutforge.llmgen.parsing import first_json_array, parse_response
from mutforge.llmgen.prompts import (
    CONTEXT_HEADER,
    DEFAULT_EXAMPLES,
    INPUT_HEADER,
    INSTRUCTION_HEADER,
    OUTPUT_HEADER,
    PromptRequest,
    PromptTemplateId,
    budget_for,
    build_prompt,
    context_block,
)
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import GenerationSummary, TokenUsage

FUNCTION = "fn add(a, b) {\n    let s = a + b;\n    return s;\n}"
TESTS = "fn test_add() {\n    return add(1, 2) == 3;\n}"
SPAN = SourceLocation(file="calc.mini", line_start=2, line_end=3)


def request(template: PromptTemplateId, **overrides) -> PromptRequest:
    fields = {
        "template": template,
        "target": "    let s = a + b;\n    return s;",
        "location": SPAN,
        "enclosing_function": FUNCTION,
        "unit_tests": TESTS,
        "examples": DEFAULT_EXAMPLES,
        "budget": 2,
    }
    fields.update(overrides)
    return PromptRequest(**fields)


class FakeResponse:
    def __init__(self, status_code: int, body=None, text: str = "") -> None:
        self.status_code = status_code
        self._body = body
        self.text = text or json.dumps(body)

    def json(self):
        if self._body is None:
            raise ValueError("not JSON")
        return self._body


def chat_body(content, prompt_tokens: int = 12, completion_tokens: int = 5) -> dict:
    return {
        "choices": [{"message": {"role": "assistant", "content": content}}],
        "usage": {"prompt_tokens": prompt_tokens, "completion_tokens": completion_tokens},
    }


@pytest.fixture
def http_descriptor():
    return BackendConfig(
        id="chat",
        kind="http-chat",
        endpoint="http://localhost:9/v1/chat/completions",
        model_name="gpt-3.5-turbo",
        retries=2,
        backoff=0.5,
    )


@pytest.fixture
def no_sleep(monkeypatch):
    delays: list[float] = []
    monkeypatch.setattr(backends.time, "sleep", delays.append)
    return delays


class TestPrompts:
    """Tests for prompt construction."""

    @pytest.mark.smoke
    def test_sections_in_order(self):
        prompt = build_prompt(request(PromptTemplateId.P1))
        positions = [prompt.index(h) for h in (INSTRUCTION_HEADER, CONTEXT_HEADER, INPUT_HEADER, OUTPUT_HEADER)]

        assert positions == sorted(positions), "Sections should appear in the fixed order"
        assert "2:     let s = a + b;\n3:     return s;" in prompt, "Target lines are numbered from the span start"
        assert "Generate 2 mutants." in prompt, "Budget is stated"

    def test_context_blocks_nest(self):
        standalone = context_block(request(PromptTemplateId.P3))
        blocks = [context_block(request(t)) for t in ("P2", "P1", "P4")]

        for shorter, longer in zip(blocks, blocks[1:], strict=False):
            assert longer.startswith(shorter), "Each context block extends the previous one"
        assert FUNCTION not in standalone, "P3 shows no enclosing function"
        assert TESTS in blocks[2] and TESTS not in blocks[1], "Only P4 includes the tests"
        assert "Buggy version" in blocks[1] and "Buggy version" not in blocks[0], "Only P1 and P4 have examples"

    @pytest.mark.parametrize("template", list(PromptTemplateId))
    def test_framing_is_part_of_the_instruction(self, template):
        prompt = build_prompt(request(template))
        instruction = prompt[prompt.index(INSTRUCTION_HEADER) : prompt.index(CONTEXT_HEADER)]

        assert "Mutation testing evaluates a test suite" in instruction, f"{template} frames the task up front"
        assert "Mutation testing" not in context_block(request(template)), f"{template} context holds no framing"

    @pytest.mark.parametrize(
        ("template", "missing", "field"),
        [
            ("P1", {"enclosing_function": None}, "enclosing_function"),
            ("P2", {"enclosing_function": "  "}, "enclosing_function"),
            ("P1", {"examples": ()}, "examples"),
            ("P4", {"unit_tests": None}, "unit_tests"),
        ],
    )
    def test_missing_fields(self, template, missing, field):
        with pytest.raises(PromptFieldError) as exc_info:
            build_prompt(request(PromptTemplateId(template), **missing))

        assert exc_info.value.context["field"] == field, f"Error should name {field}"

    def test_p3_needs_nothing_else(self):
        prompt = build_prompt(request(PromptTemplateId.P3, enclosing_function=None, examples=(), unit_tests=None))

        assert "Mutation testing" in prompt, "P3 still carries the framing"
        assert "shown without its surrounding code" in prompt, "P3 says the target stands alone"

    def test_target_must_match_span(self):
        with pytest.raises(ValueError, match="PROMPT_TARGET"):
            request(PromptTemplateId.P1, target="    let s = a + b;")

    def test_budget(self):
        assert budget_for("a;\n\n  \nb;") == 2, "One mutant per non-blank line"
        with pytest.raises(BudgetError):
            budget_for(" \n ")


class TestParsing:
    """Tests for response parsing."""

    @pytest.mark.smoke
    def test_fenced_json_in_prose(self):
        raw = 'Sure! Here you go:\n```json\n[{"line": 2, "mutated_code": "    let s = a - b;"}]\n```'

        parsed = parse_response(raw, SPAN)

        assert parsed.candidates == ((SPAN.single_line(2), "    let s = a - b;"),), f"Unexpected {parsed}"
        assert not parsed.parse_failed, "An array was found"

    def test_bad_elements_are_skipped(self):
        raw = json.dumps(
            [
                {"line": 9, "mutated_code": "x;"},
                {"line": "3", "mutated_code": "    return -s;"},
                {"line": True, "mutated_code": "y;"},
                {"line": 2, "mutated_code": "  "},
                "not an object",
            ]
        )

        parsed = parse_response(raw, SPAN)

        assert [loc.line_start for loc, _ in parsed.candidates] == [3], "Numeric strings are accepted"
        assert parsed.skipped == 4, f"Four elements should be skipped, got {parsed.skipped}"

    def test_no_array(self):
        assert parse_response("I cannot help with that.", SPAN).parse_failed, "Prose only fails to parse"

    def test_first_array_wins(self):
        assert first_json_array("see [broken and [1, 2] then [3]") == [1, 2], "First well-formed array"


class TestHttpBackend:
    """Tests for HttpChatBackend with requests.post monkeypatched."""

    def test_reads_content_and_usage(self, monkeypatch, http_descriptor):
        calls = []

        def fake_post(url, json=None, headers=None, timeout=None):
            calls.append((url, json, headers))
            return FakeResponse(200, chat_body("[]"))

        monkeypatch.setattr(backends.requests, "post", fake_post)

        text, usage = HttpChatBackend(http_descriptor, api_key="k-1").complete("hello")

        assert text == "[]", "Content should be returned"
        assert usage == TokenUsage(prompt_tokens=12, completion_tokens=5), "Usage should be read"
        url, payload, headers = calls[0]
        assert payload["model"] == "gpt-3.5-turbo", "Model name is sent"
        assert payload["messages"] == [{"role": "user", "content": "hello"}], "Prompt is the user message"
        assert payload["temperature"] == 1.0, "Default temperature"
        assert headers["Authorization"] == "Bearer k-1", "Key is sent as a bearer token"

    def test_retries_then_succeeds(self, monkeypatch, http_descriptor, no_sleep):
        answers = [requests.ConnectionError("refused"), FakeResponse(503, text="busy"), FakeResponse(200, chat_body("ok"))]

        def fake_post(*args, **kwargs):
            answer = answers.pop(0)
            if isinstance(answer, Exception):
                raise answer
            return answer

        monkeypatch.setattr(backends.requests, "post", fake_post)

        text, _ = HttpChatBackend(http_descriptor).complete("p")

        assert text == "ok", "Third attempt succeeds"
        assert no_sleep == [0.5, 1.0], f"Backoff doubles per attempt, got {no_sleep}"

    def test_gives_up_after_retries(self, monkeypatch, http_descriptor, no_sleep):
        monkeypatch.setattr(backends.requests, "post", lambda *a, **k: FakeResponse(429, text="slow down"))

        with pytest.raises(TransportError, match="3 attempt"):
            HttpChatBackend(http_descriptor).complete("p")

    def test_client_error_is_not_retried(self, monkeypatch, http_descriptor, no_sleep):
        monkeypatch.setattr(backends.requests, "post", lambda *a, **k: FakeResponse(401, text="bad key"))

        with pytest.raises(TransportError, match="401"):
            HttpChatBackend(http_descriptor).complete("p")
        assert no_sleep == [], "4xx answers other than 429 fail at once"

    @pytest.mark.parametrize("body", [None, {"choices": []}, chat_body(["x"]), {**chat_body("x"), "usage": {"prompt_tokens": "many"}}])
    def test_bad_envelopes(self, monkeypatch, http_descriptor, body):
        monkeypatch.setattr(backends.requests, "post", lambda *a, **k: FakeResponse(200, body, text="?"))

        with pytest.raises(ProtocolError):
            HttpChatBackend(http_descriptor).complete("p")

    def test_null_content_is_empty(self, monkeypatch, http_descriptor):
        monkeypatch.setattr(backends.requests, "post", lambda *a, **k: FakeResponse(200, chat_body(None)))

        assert HttpChatBackend(http_descriptor).complete("p")[0] == "", "Null content reads as empty text"

    def test_endpoint_required(self):
        with pytest.raises(ValueError, match="BACKEND_ENDPOINT"):
            BackendConfig(id="chat", kind="http-chat")


class TestStubBackend:
    """Tests for the offline stub."""

    def prompt(self, budget: int = 20) -> tuple[str, SourceLocation]:
        lines = [f"    total = total + v{i};" if i % 2 else f"    r{i} = check(x, {i});" for i in range(20)]
        location = SourceLocation(file="calc.mini", line_start=10, line_end=29)
        req = PromptRequest(
            template=PromptTemplateId.P3,
            target="\n".join(lines),
            location=location,
            budget=budget,
        )
        return build_prompt(req), location

    @pytest.mark.smoke
    def test_answers_inside_the_span(self):
        prompt, location = self.prompt()

        result = request_mutations(StubBackend(BackendConfig(id="stub", kind="stub")), prompt, location)

        assert len(result.candidates) == 20, f"Budget of 20 should give 20 candidates, got {len(result.candidates)}"
        assert all(location.contains_line(loc.line_start) for loc, _ in result.candidates), "Lines stay in the span"
        assert result.usage.prompt_tokens > 0 and result.usage.completion_tokens > 0, "Usage is reported"

    def test_deterministic_per_seed(self):
        prompt, _ = self.prompt()
        stub = create_backend(BackendConfig(id="stub", kind="stub", seed=3))

        assert stub.complete(prompt) == stub.complete(prompt), "Same seed, same answer"
        other = create_backend(BackendConfig(id="stub", kind="stub", seed=4))
        assert other.complete(prompt)[0] != stub.complete(prompt)[0], "Another seed shifts the mix"

    def test_pattern_mix(self):
        pattern = StubBackend.STUB_PATTERN

        assert len(pattern) == 20, "Pattern covers 20 slots"
        assert {s: pattern.count(s) for s in "RUSDI"} == {"R": 12, "U": 3, "S": 2, "D": 2, "I": 1}, (
            "Mix is 12 rule, 3 unknown-function, 2 structural, 2 duplicate, 1 identical"
        )

    def test_unknown_functions_are_injected(self):
        prompt, _ = self.prompt()

        text, _ = StubBackend(BackendConfig(id="stub", kind="stub")).complete(prompt)
        entries = first_json_array(text)

        assert any("gcheck(" in e["mutated_code"] or "gx(" in e["mutated_code"] for e in entries), (
            "Some entries should call an unknown g-prefixed function"
        )

    def ask(self, first_line: int, lines: list[str], seed: int = 0) -> list[dict]:
        target = "\n".join(lines)
        location = SourceLocation(file="calc.mini", line_start=first_line, line_end=first_line + len(lines) - 1)
        prompt = build_prompt(
            PromptRequest(template=PromptTemplateId.P3, target=target, location=location, budget=budget_for(target))
        )
        text, _ = StubBackend(BackendConfig(id="stub", kind="stub", seed=seed)).complete(prompt)
        return first_json_array(text)

    def test_rule_slots_borrow_and_never_repeat(self):
        # seed 0: line 4 is a D slot with no earlier R, lines 5 and 6 are R slots
        entries = self.ask(4, ["    // running total", "    total = total + v;", "    }"])

        assert [e["line"] for e in entries] == [5, 5, 5], "Every slot borrows the only substitutable line"
        codes = [e["mutated_code"] for e in entries]
        assert len(set(codes)) == 3, f"Rule mutants of one response are distinct, got {codes}"
        assert "    total = total + v;" not in codes, "No slot echoes the original line"

    def test_structural_break_uses_nearest_closer(self):
        # seed 0: line 7 is an S slot
        entries = self.ask(7, ["    // note", "    x = 1;"])

        assert entries[0] == {"line": 8, "mutated_code": "    x = 1"}, f"The comment has no closer to drop, got {entries[0]}"

    def test_unknown_function_uses_nearest_callee(self):
        # seed 0: line 2 is a U slot
        entries = self.ask(2, ["    let y = x;", "    return f(y);"])

        assert entries[0] == {"line": 3, "mutated_code": "    return gf(y);"}, f"The call on line 3 is renamed, got {entries[0]}"

    def test_exhausted_rules_become_unknown_functions(self):
        # seed 0: line 11 is an R slot with nothing to substitute
        entries = self.ask(11, ["    return math.pow(base, exponent);"])

        assert entries == [{"line": 11, "mutated_code": "    return math.gpow(base, exponent);"}], (
            f"Without substitutions an R slot injects an unknown function, got {entries}"
        )

    def test_no_target_lines(self):
        text, _ = StubBackend(BackendConfig(id="stub", kind="stub")).complete("no sections here")

        assert first_json_array(text) is None, "Without targets the stub answers in prose"


class TestCost:
    """Tests for cost metrics."""

    @pytest.mark.smoke
    def test_agt_and_price(self):
        backend = BackendConfig(id="chat", kind="stub", price_prompt=0.0015, price_completion=0.002)
        summaries = [
            GenerationSummary(wall_time=4.0, candidates=3, usage=TokenUsage(prompt_tokens=1000, completion_tokens=500)),
            GenerationSummary(wall_time=2.0, candidates=1, usage=TokenUsage(prompt_tokens=1000, completion_tokens=500)),
        ]

        report = cost_of(summaries, backend)

        assert report.agt == pytest.approx(1.5), f"6 s over 4 mutants, got {report.agt}"
        assert report.usd_per_1k == pytest.approx(1000 * 0.005 / 4), f"Unexpected price {report.usd_per_1k}"
        assert report.usage == TokenUsage(prompt_tokens=2000, completion_tokens=1000), "Usage is summed"

    def test_rule_generators_are_free(self):
        report = cost_of([GenerationSummary(wall_time=0.2, candidates=10)], None)

        assert report.usd_per_1k == 0.0, "No backend means zero price"

    def test_token_cost(self):
        backend = BackendConfig(id="chat", kind="stub", price_prompt=0.01, price_completion=0.03)

        assert token_cost(TokenUsage(prompt_tokens=2000, completion_tokens=1000), backend) == pytest.approx(0.05), (
            "Prices are per 1K tokens"
        )

    def test_no_candidates(self):
        with pytest.raises(CostError):
            cost_of([GenerationSummary(wall_time=1.0, candidates=0)], None)
