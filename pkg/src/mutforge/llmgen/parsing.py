"""
Response parsing.

Models wrap their JSON in prose and code fences. The first well-formed JSON
array in the response wins; elements that are not objects, name a line
outside the target span or carry no code are skipped and counted.
"""

import json
import logging

from pydantic import BaseModel, ConfigDict

from mutforge.schemas.location import SourceLocation

logger = logging.getLogger(__name__)

_DECODER = json.JSONDecoder()


class ParsedResponse(BaseModel):
    """
    Attributes:
        candidates: (location, mutated_code) pairs in response order.
        skipped: Malformed or out-of-span elements dropped.
        parse_failed: True when the response holds no JSON array.
    """

    model_config = ConfigDict(frozen=True)

    candidates: tuple[tuple[SourceLocation, str], ...] = ()
    skipped: int = 0
    parse_failed: bool = False


def first_json_array(raw: str) -> list | None:
    """The first substring of ``raw`` that decodes as a JSON array."""
    index = raw.find("[")
    while index != -1:
        try:
            value, _ = _DECODER.raw_decode(raw, index)
        except json.JSONDecodeError:
            value = None
        if isinstance(value, list):
            return value
        index = raw.find("[", index + 1)
    return None


def parse_response(raw: str, target_location: SourceLocation) -> ParsedResponse:
    """
    Extract mutation candidates from a model answer.

    Args:
        raw: Response text.
        target_location: Span the prompt asked about; candidates outside it are skipped.

    Returns:
        ParsedResponse; never raises on bad input.
    """
    array = first_json_array(raw)
    if array is None:
        logger.info(
            "No JSON array in response",
            extra={"extra_fields": {"target": str(target_location), "response_chars": len(raw)}},
        )
        return ParsedResponse(parse_failed=True)

    candidates: list[tuple[SourceLocation, str]] = []
    skipped = 0
    for element in array:
        if not isinstance(element, dict):
            skipped += 1
            continue
        line = element.get("line")
        code = element.get("mutated_code")
        if isinstance(line, str) and line.strip().isdigit():
            line = int(line.strip())
        if (
            not isinstance(line, int)
            or isinstance(line, bool)
            or not target_location.contains_line(line)
            or not isinstance(code, str)
            or not code.strip()
        ):
            skipped += 1
            continue
        candidates.append((target_location.single_line(line), code.rstrip("\n")))

    if skipped:
        logger.info(
            "Skipped malformed response elements",
            extra={"extra_fields": {"target": str(target_location), "skipped": skipped, "kept": len(candidates)}},
        )
    return ParsedResponse(candidates=tuple(candidates), skipped=skipped)
