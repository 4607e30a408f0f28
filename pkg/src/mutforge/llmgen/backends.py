"""
Chat backends.

Two implementations share the ChatBackend contract ``complete(prompt) ->
(text, usage)``:

- HttpChatBackend speaks the chat-completion wire format over requests:
  POST {model, messages, temperature}, read ``choices[0].message.content``
  and ``usage.{prompt_tokens, completion_tokens}``. Connection errors, 429
  and 5xx answers are retried with exponential backoff.
- StubBackend answers offline and deterministically. It reads the numbered
  target lines out of the prompt and fakes model output with a fixed
  per-line defect mix (see StubBackend).

request_mutations wraps a backend call with timing and response parsing.
"""

import json
import logging
import re
import threading
import time
from abc import ABC, abstractmethod

import numpy as np
import requests
from pydantic import BaseModel, ConfigDict, Field

from mutforge.config import BackendConfig
from mutforge.errors import LexicalError, ProtocolError, TransportError
from mutforge.llmgen.parsing import parse_response
from mutforge.llmgen.prompts import INPUT_HEADER, OUTPUT_HEADER
from mutforge.rulegen.operators import line_substitutions
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import GenerationSummary, TokenUsage
from mutforge.syntax.tokens import Token, TokenKind, render, tokenize

logger = logging.getLogger(__name__)

BackendDescriptor = BackendConfig

RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


class GenerationResult(BaseModel):
    """
    One backend answer.

    Attributes:
        raw_response: Completion text as received.
        candidates: (location, mutated_code) pairs parsed from raw_response.
        usage: Token usage.
        wall_time: Seconds spent waiting for the answer.
        skipped: Response elements dropped by the parser.
        parse_failed: True when the answer held no JSON array.
    """

    model_config = ConfigDict(frozen=True)

    raw_response: str
    candidates: tuple[tuple[SourceLocation, str], ...] = ()
    usage: TokenUsage = TokenUsage()
    wall_time: float = Field(default=0.0, ge=0.0)
    skipped: int = 0
    parse_failed: bool = False

    def summary(self) -> GenerationSummary:
        return GenerationSummary(
            wall_time=self.wall_time,
            usage=self.usage,
            candidates=len(self.candidates),
            skipped=self.skipped,
            parse_failed=self.parse_failed,
        )


class ChatBackend(ABC):
    """Base class; limits concurrent requests to ``max_in_flight``."""

    def __init__(self, descriptor: BackendConfig) -> None:
        self.descriptor = descriptor
        self._in_flight = threading.BoundedSemaphore(descriptor.max_in_flight)

    @property
    def id(self) -> str:
        return self.descriptor.id

    def complete(self, prompt: str) -> tuple[str, TokenUsage]:
        with self._in_flight:
            return self._complete(prompt)

    @abstractmethod
    def _complete(self, prompt: str) -> tuple[str, TokenUsage]:
        """Send one prompt; return the completion text and usage."""


class HttpChatBackend(ChatBackend):
    """
    Args:
        descriptor: Backend configuration (endpoint, model, retries...).
        api_key: Bearer token; requests go unauthenticated when None.
    """

    def __init__(self, descriptor: BackendConfig, api_key: str | None = None) -> None:
        super().__init__(descriptor)
        self.api_key = api_key

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _complete(self, prompt: str) -> tuple[str, TokenUsage]:
        d = self.descriptor
        payload = {
            "model": d.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": d.temperature,
        }
        last_error = "no attempt made"
        for attempt in range(d.retries + 1):
            try:
                response = requests.post(
                    d.endpoint or "",
                    json=payload,
                    headers=self._headers(),
                    timeout=d.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
            else:
                if response.status_code in RETRY_STATUS:
                    last_error = f"HTTP {response.status_code}"
                elif response.status_code >= 400:
                    raise TransportError(
                        f"backend '{d.id}' answered HTTP {response.status_code}: {response.text[:200]}",
                        backend=d.id,
                        status=response.status_code,
                    )
                else:
                    return self._read(response)

            if attempt < d.retries:
                delay = d.backoff * (2**attempt)
                logger.warning(
                    "Chat request failed, retrying",
                    extra={
                        "extra_fields": {
                            "backend": d.id,
                            "attempt": attempt + 1,
                            "delay": delay,
                            "error": last_error,
                        }
                    },
                )
                time.sleep(delay)

        raise TransportError(
            f"backend '{d.id}' unreachable after {d.retries + 1} attempt(s): {last_error}",
            backend=d.id,
        )

    def _read(self, response: requests.Response) -> tuple[str, TokenUsage]:
        try:
            data = response.json()
        except ValueError as exc:
            raise ProtocolError(f"backend '{self.id}' returned non-JSON body", backend=self.id) from exc
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(
                f"backend '{self.id}' response lacks choices[0].message.content",
                backend=self.id,
            ) from exc
        if content is None:
            content = ""
        if not isinstance(content, str):
            raise ProtocolError(f"backend '{self.id}' returned non-text content", backend=self.id)

        usage_data = data.get("usage") or {}
        try:
            usage = TokenUsage(
                prompt_tokens=int(usage_data.get("prompt_tokens", 0)),
                completion_tokens=int(usage_data.get("completion_tokens", 0)),
            )
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"backend '{self.id}' returned malformed usage", backend=self.id) from exc
        return content, usage


_TARGET_LINE = re.compile(r"^(\d+): ?(.*)$")
_BUDGET = re.compile(r"Generate (\d+) mutants?\.")


class StubBackend(ChatBackend):
    """
    Offline backend with a positional defect mix.

    For the i-th requested mutant the stub picks target line L (cycling over
    the non-blank target lines, pass k = i // line count) and the slot
    ``STUB_PATTERN[(L + seed + 7k) mod 20]``:

        R  rule substitution: a seeded pick from line_substitutions of the
           nearest line that has one left; never repeats an R of the same
           response, and becomes a U once every substitution is used
        U  unknown function: a ``g`` prefix on the nearest callee, else a
           ``gx(...)`` call around an operand or before a statement
        S  structural break: the last ``;``, ``{`` or ``}`` of the nearest
           line that has one removed
        D  duplicate: the response's latest R mutant with single spacing,
           or a fresh R when none came before
        I  identical: the original line with single spacing

    Over 20 consecutive lines this gives 12 R, 3 U, 2 S, 2 D and 1 I, so a
    screened stub pool lands near CR 0.75 and UMR 0.15.
    """

    STUB_PATTERN = "RRURDRRSRIRRURDRSURR"

    def _complete(self, prompt: str) -> tuple[str, TokenUsage]:
        targets, budget = self._read_prompt(prompt)
        lines = [n for n, code in targets.items() if code.strip()]
        if not lines:
            completion = "I could not find a target code element in the request."
        else:
            entries = self._entries(targets, lines, budget or len(lines))
            completion = (
                "Here are the mutants for the target code element.\n"
                f"```json\n{json.dumps(entries, indent=2)}\n```\n"
            )
        usage = TokenUsage(prompt_tokens=len(prompt.split()), completion_tokens=len(completion.split()))
        return completion, usage

    @staticmethod
    def _read_prompt(prompt: str) -> tuple[dict[int, str], int]:
        _, _, rest = prompt.partition(INPUT_HEADER)
        section, _, _ = rest.partition(OUTPUT_HEADER)
        targets: dict[int, str] = {}
        for raw in section.split("\n"):
            match = _TARGET_LINE.match(raw)
            if match:
                targets[int(match[1])] = match[2]
        budget = _BUDGET.search(section)
        return targets, int(budget[1]) if budget else 0

    def _seed(self) -> int:
        return self.descriptor.seed % (2**32)

    def _entries(self, targets: dict[int, str], lines: list[int], budget: int) -> list[dict[str, object]]:
        entries: list[dict[str, object]] = []
        emitted: set[tuple[int, str]] = set()
        last_rule: tuple[int, str] | None = None
        for i in range(budget):
            line = lines[i % len(lines)]
            k = i // len(lines)
            slot = self.STUB_PATTERN[(line + self._seed() + 7 * k) % len(self.STUB_PATTERN)]
            if slot == "U":
                produced = _unknown_function(line, targets, lines)
            elif slot == "S":
                produced = _structural_break(line, targets, lines)
            elif slot == "I":
                produced = (line, _respaced(targets[line]))
            elif slot == "D" and last_rule is not None:
                produced = (last_rule[0], _respaced(last_rule[1]))
            else:
                # R, or a D with no earlier R to repeat
                rule = self._rule(line, k, targets, lines, emitted)
                if rule is None:
                    produced = _unknown_function(line, targets, lines)
                else:
                    produced = last_rule = rule
                    emitted.add(rule)
            entries.append({"line": produced[0], "mutated_code": produced[1]})
        return entries

    def _rule(
        self,
        line: int,
        k: int,
        targets: dict[int, str],
        lines: list[int],
        emitted: set[tuple[int, str]],
    ) -> tuple[int, str] | None:
        for candidate in _nearest_first(line, lines):
            substitutions = line_substitutions(targets[candidate])
            if not substitutions:
                continue
            rng = np.random.default_rng([self._seed(), line, k, candidate])
            start = int(rng.integers(len(substitutions)))
            for step in range(len(substitutions)):
                picked = (candidate, substitutions[(start + step) % len(substitutions)])
                if picked not in emitted:
                    return picked
        return None


def _unknown_function(line: int, targets: dict[int, str], lines: list[int]) -> tuple[int, str]:
    nearest = _nearest_first(line, lines)
    for candidate in nearest:
        code = targets[candidate]
        callee = _callee(_tokens(code))
        if callee is not None:
            return candidate, code[:callee.offset] + "g" + code[callee.offset:]
    for candidate in nearest:
        code = targets[candidate]
        operand = _expression_identifier(_tokens(code))
        if operand is not None:
            return candidate, f"{code[:operand.offset]}gx({operand.text}){code[operand.end:]}"
    statement = next((n for n in nearest if _ends_statement(targets[n])), line)
    code = targets[statement]
    indent = code[: len(code) - len(code.lstrip())]
    return statement, f"{indent}gx(); {code.lstrip()}"


def _tokens(code: str) -> list[Token]:
    try:
        return tokenize(code)
    except LexicalError:
        return []


def _nearest_first(line: int, lines: list[int]) -> list[int]:
    return sorted(lines, key=lambda n: (abs(n - line), n))


def _callee(tokens: list[Token]) -> Token | None:
    for index, token in enumerate(tokens[:-1]):
        if token.kind is not TokenKind.IDENTIFIER or tokens[index + 1].text != "(":
            continue
        if index > 0 and tokens[index - 1].text == "fn":
            continue
        return token
    return None


def _expression_identifier(tokens: list[Token]) -> Token | None:
    for index, token in enumerate(tokens):
        if token.kind is not TokenKind.IDENTIFIER or index == 0:
            continue
        previous = tokens[index - 1]
        following = tokens[index + 1].text if index + 1 < len(tokens) else ""
        if following in ("(", "."):
            continue
        if previous.text in ("=", "(") or previous.kind is TokenKind.OPERATOR:
            return token
    return None


def _closer(code: str) -> Token | None:
    return next((t for t in reversed(_tokens(code)) if t.text in (";", "{", "}")), None)


def _ends_statement(code: str) -> bool:
    tokens = _tokens(code)
    return bool(tokens) and tokens[-1].text == ";"


def _structural_break(line: int, targets: dict[int, str], lines: list[int]) -> tuple[int, str]:
    for candidate in _nearest_first(line, lines):
        code = targets[candidate]
        closer = _closer(code)
        if closer is None:
            continue
        broken = code[:closer.offset] + code[closer.end:]
        if broken.strip():
            return candidate, broken
    return line, f"{targets[line].rstrip()} )"


def _respaced(code: str) -> str:
    indent = code[: len(code) - len(code.lstrip())]
    tokens = _tokens(code)
    return indent + render(tokens) if tokens else code


def create_backend(descriptor: BackendConfig, api_key: str | None = None) -> ChatBackend:
    if descriptor.kind == "stub":
        return StubBackend(descriptor)
    return HttpChatBackend(descriptor, api_key=api_key)


def request_mutations(backend: ChatBackend, prompt: str, target: SourceLocation) -> GenerationResult:
    """
    Send a prompt and parse the answer.

    Raises:
        TransportError: If the backend stays unreachable after its retries.
        ProtocolError: If the provider envelope cannot be read.
    """
    started = time.monotonic()
    raw, usage = backend.complete(prompt)
    wall_time = time.monotonic() - started
    parsed = parse_response(raw, target)
    logger.info(
        "Mutations requested",
        extra={
            "extra_fields": {
                "backend": backend.id,
                "target": str(target),
                "candidates": len(parsed.candidates),
                "skipped": parsed.skipped,
                "parse_failed": parsed.parse_failed,
                "prompt_tokens": usage.prompt_tokens,
                "completion_tokens": usage.completion_tokens,
            }
        },
    )
    return GenerationResult(
        raw_response=raw,
        candidates=parsed.candidates,
        usage=usage,
        wall_time=wall_time,
        skipped=parsed.skipped,
        parse_failed=parsed.parse_failed,
    )
