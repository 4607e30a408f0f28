"""
Configuration management for mutforge.

Two layers:

- Environment (``load_config``): secrets and machine settings read through
  python-dotenv, so a ``.env`` file next to the working directory works.
- Run configuration (``load_run_config``): a TOML or JSON file validated into
  ExperimentConfig. Errors name the dotted key and the file.

Example Usage:
    >>> from mutforge.config import load_run_config
    >>> cfg = load_run_config(Path("config/run.example.toml"), seed=7)
    >>> cfg.context_length
    3
"""

import json
import os
import tomllib
from importlib import resources
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from mutforge.errors import ConfigError

PromptTemplateName = Literal["P1", "P2", "P3", "P4"]
DEFAULT_OUT_DIR = Path("mutforge-out")


def load_config() -> dict[str, Any]:
    """
    Load environment configuration.

    Returns:
        Dict with ``api_key`` (may be None), ``log_level`` and ``work_dir``
        (None means the system temp directory).
    """
    load_dotenv()
    work_dir = os.getenv("MUTFORGE_WORK_DIR")
    return {
        "api_key": os.getenv("MUTFORGE_API_KEY"),
        "log_level": os.getenv("MUTFORGE_LOG_LEVEL", "INFO"),
        "work_dir": Path(work_dir) if work_dir else None,
    }


def bundled_bugs_dir() -> Path:
    """Directory of the bundled MiniLang bug cases."""
    return Path(str(resources.files("mutforge") / "data" / "bugs"))


class BackendConfig(BaseModel):
    """
    Chat backend description.

    Attributes:
        id: Name generators refer to.
        kind: ``http-chat`` or ``stub``.
        endpoint: Chat-completion URL (http-chat only).
        model_name: Model identifier sent to the provider.
        price_prompt: USD per 1K prompt tokens.
        price_completion: USD per 1K completion tokens.
        max_in_flight: Concurrent requests the backend tolerates.
        temperature: Sampling temperature.
        seed: Stub seed.
        retries: Transport retries before giving up.
        backoff: First retry delay in seconds; doubles per attempt.
        request_timeout: Seconds per HTTP request.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(..., description="Backend name", examples=["gpt-3.5", "stub"])
    kind: Literal["http-chat", "stub"]
    endpoint: str | None = Field(default=None, examples=["https://api.openai.com/v1/chat/completions"])
    model_name: str = "stub"
    price_prompt: float = Field(default=0.0, ge=0.0)
    price_completion: float = Field(default=0.0, ge=0.0)
    max_in_flight: int = Field(default=1, ge=1)
    temperature: float = Field(default=1.0, ge=0.0, le=2.0)
    seed: int = Field(default=0, ge=0)
    retries: int = Field(default=3, ge=0)
    backoff: float = Field(default=1.0, ge=0.0)
    request_timeout: float = Field(default=120.0, gt=0.0)

    @model_validator(mode="after")
    def validate_endpoint(self) -> "BackendConfig":
        if self.kind == "http-chat" and not self.endpoint:
            raise ValueError("BACKEND_ENDPOINT: http-chat backends need an endpoint")
        return self


class GeneratorConfig(BaseModel):
    """
    One column of the experiment grid.

    Attributes:
        id: Generator name used in reports.
        kind: ``llm`` (backend + prompt template) or ``rule``.
        backend: BackendConfig id (llm only).
        prompt: Prompt template (llm only).
        operators: Rule operators (rule only).
        examples_file: JSON list of {correct, buggy} pairs replacing the default few-shot set.
        examples_limit: Use only the first k few-shot pairs.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    kind: Literal["llm", "rule"]
    backend: str | None = None
    prompt: PromptTemplateName = "P1"
    operators: tuple[str, ...] = ("AOR", "ROR", "LOR", "LVR", "UOI", "SDL")
    examples_file: Path | None = None
    examples_limit: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def validate_kind_fields(self) -> "GeneratorConfig":
        if self.kind == "llm" and not self.backend:
            raise ValueError("GENERATOR_BACKEND: llm generators need a backend id")
        if self.kind == "rule":
            from mutforge.rulegen.operators import parse_operators

            parse_operators(self.operators)
        return self


class AdapterConfig(BaseModel):
    """
    Toolchain adapter selection.

    Attributes:
        kind: ``minilang`` (in-process) or ``subprocess``.
        check_cmd, test_cmd, list_tests_cmd, pass_exit_code: subprocess commands.
        concurrent_safe: Whether workspaces may run concurrently.
        max_steps: MiniLang interpreter step budget per test.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["minilang", "subprocess"] = "minilang"
    check_cmd: str | None = None
    test_cmd: str | None = None
    list_tests_cmd: str | None = None
    pass_exit_code: int = 0
    concurrent_safe: bool = True
    max_steps: int = Field(default=100_000, ge=1)

    @model_validator(mode="after")
    def validate_commands(self) -> "AdapterConfig":
        if self.kind == "subprocess":
            missing = [
                name for name in ("check_cmd", "test_cmd", "list_tests_cmd") if not getattr(self, name)
            ]
            if missing:
                raise ValueError(f"ADAPTER_CONFIG: subprocess adapter needs {', '.join(missing)}")
            if "{test_id}" not in (self.test_cmd or ""):
                raise ValueError("ADAPTER_CONFIG: test_cmd must contain '{test_id}'")
        return self


class ClassifierRule(BaseModel):
    """
    Compile-error classification rule.

    Attributes:
        pattern: Regular expression searched in the diagnostic field.
        error_type: ErrorType name assigned on match.
        field: ``kind`` or ``message``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    pattern: str
    error_type: str
    field: Literal["kind", "message"] = "message"

    @field_validator("pattern")
    @classmethod
    def validate_pattern(cls, v: str) -> str:
        import re

        try:
            re.compile(v)
        except re.error as exc:
            raise ValueError(f"CLASSIFIER_PATTERN: {exc}") from None
        return v

    @field_validator("error_type")
    @classmethod
    def validate_error_type(cls, v: str) -> str:
        from mutforge.study.taxonomy import ErrorType

        try:
            ErrorType(v)
        except ValueError:
            raise ValueError(f"CLASSIFIER_ERROR_TYPE: unknown error type '{v}'") from None
        return v


class ExperimentConfig(BaseModel):
    """
    Full run configuration.

    Attributes:
        bugs_dir: Directory of bug cases (bundled MiniLang corpus by default).
        bugs: Bug ids to run; empty means every bug case in bugs_dir.
        backends: Chat backends.
        generators: Grid columns.
        adapter: Toolchain adapter.
        context_length: Lines of mutation target around the bug (1, 2 or 3).
        workers: Concurrent jobs.
        timeout: Fixed per-test timeout; None uses the baseline multiplier.
        timeout_multiplier: Per-test timeout = max(1 s, multiplier x baseline wall time).
        out_dir: Report bundle directory.
        seed: Master seed.
        subsample_rounds: Equal-count subsampling rounds.
        confidence, margin: Equivalence sampling plan.
        classifier_rules: Extra compile-error rules, tried before the built-in ones.
        labels_file: Completed equivalence labels CSV, if any.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    bugs_dir: Path = Field(default_factory=bundled_bugs_dir)
    bugs: tuple[str, ...] = ()
    backends: tuple[BackendConfig, ...] = ()
    generators: tuple[GeneratorConfig, ...] = ()
    adapter: AdapterConfig = AdapterConfig()
    context_length: int = 3
    workers: int = Field(default=1, ge=1)
    timeout: float | None = Field(default=None, gt=0.0)
    timeout_multiplier: float = Field(default=10.0, gt=0.0)
    out_dir: Path = DEFAULT_OUT_DIR
    seed: int = Field(default=0, ge=0)
    subsample_rounds: int = Field(default=10, ge=0)
    confidence: float = 0.95
    margin: float = Field(default=0.05, gt=0.0, lt=1.0)
    classifier_rules: tuple[ClassifierRule, ...] = ()
    labels_file: Path | None = None

    @field_validator("context_length")
    @classmethod
    def validate_context_length(cls, v: int) -> int:
        if v not in (1, 2, 3):
            raise ValueError(f"CONTEXT_LENGTH: must be 1, 2 or 3, got {v}")
        return v

    @field_validator("confidence")
    @classmethod
    def validate_confidence(cls, v: float) -> float:
        if v not in (0.90, 0.95, 0.99):
            raise ValueError(f"CONFIDENCE: must be 0.90, 0.95 or 0.99, got {v}")
        return v

    @model_validator(mode="after")
    def validate_references(self) -> "ExperimentConfig":
        backend_ids = [b.id for b in self.backends]
        if len(set(backend_ids)) != len(backend_ids):
            raise ValueError("BACKEND_IDS: backend ids must be unique")
        generator_ids = [g.id for g in self.generators]
        if len(set(generator_ids)) != len(generator_ids):
            raise ValueError("GENERATOR_IDS: generator ids must be unique")
        for generator in self.generators:
            if generator.kind == "llm" and generator.backend not in backend_ids:
                raise ValueError(
                    f"GENERATOR_BACKEND: generator '{generator.id}' names unknown backend '{generator.backend}'"
                )
        return self

    def backend(self, backend_id: str) -> BackendConfig:
        return next(b for b in self.backends if b.id == backend_id)


def _dotted(loc: tuple[int | str, ...]) -> str:
    parts: list[str] = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(f".{item}" if parts else item)
    return "".join(parts) or "<root>"


def read_config_file(path: Path) -> dict[str, Any]:
    """Raw mapping from a TOML (``.toml``) or JSON file."""
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", file=str(path)) from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}", file=str(path)) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object", file=str(path))
    return data


def validate_config(data: dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    """
    ExperimentConfig from a raw mapping.

    Raises:
        ConfigError: Naming the first offending dotted key and the source.
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = _dotted(tuple(first["loc"]))
        message = first["msg"].removeprefix("Value error, ")
        raise ConfigError(
            f"{source}: {key}: {message}",
            file=source,
            key=key,
            error_count=exc.error_count(),
        ) from exc


def load_run_config(path: Path | None = None, **overrides: Any) -> ExperimentConfig:
    """
    Load and validate a run configuration.

    Relative paths inside the file resolve against the file's directory.
    Keyword overrides (``seed``, ``workers``, ``out_dir`` ...) replace file
    values when not None.

    Args:
        path: TOML or JSON file; None gives the defaults.
        **overrides: Top-level keys set by CLI flags.

    Returns:
        Validated ExperimentConfig.

    Raises:
        ConfigError: If the file is unreadable or invalid.
    """
    data: dict[str, Any] = read_config_file(path) if path is not None else {}
    if path is not None:
        base = path.parent
        for key in ("bugs_dir", "out_dir", "labels_file"):
            if isinstance(data.get(key), str) and not Path(data[key]).is_absolute():
                data[key] = str(base / data[key])
        for generator in data.get("generators", []) or []:
            if isinstance(generator, dict) and isinstance(generator.get("examples_file"), str):
                if not Path(generator["examples_file"]).is_absolute():
                    generator["examples_file"] = str(base / generator["examples_file"])
    data.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(data, str(path) if path is not None else "<defaults>")
