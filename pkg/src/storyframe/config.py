"""Runtime configuration from an INI file plus environment overrides.

Sections: ``[llm]`` for the generation backend, ``[judge]`` (and ``[judge2]``,
``[judge3]``, ...) for scoring backends, ``[embed]`` for the optional
embedding backend, ``[service]`` for the HTTP service, and ``[pipeline]`` for
parse/generation defaults. Environment variables ``LLM_BASE_URL``,
``LLM_API_KEY``, ``LLM_MODEL`` (and the ``JUDGE_``/``EMBED_`` equivalents)
override the file.

Every backend can be ``backend = mock`` with a ``script`` file (JSON Lines,
one reply per line, in call order) for fully offline, reproducible runs.
"""

from __future__ import annotations

import configparser
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import LlmUnavailable
from .llm import (
    DEFAULT_BACKOFF_BASE,
    DEFAULT_MAX_RETRIES,
    DEFAULT_MAX_TOKENS,
    DEFAULT_PARALLELISM,
    DEFAULT_TEMPERATURE,
    DEFAULT_TIMEOUT,
    ChatClient,
    ClientConfig,
    HttpChatClient,
    MockChatClient,
)
from .pipeline import DEFAULT_MAX_REPAIRS, Strategy

# [judge] plus numbered extras [judge2], [judge3], ... ([judge1] would alias [judge])
_JUDGE_SECTION_RE = re.compile(r"^judge([2-9]|[1-9][0-9]+)?$")


@dataclass(frozen=True)
class BackendConfig:
    backend: str = "none"  # http | mock | none
    base_url: str = ""
    api_key: str = ""
    model: str = ""
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES
    parallelism_limit: int = DEFAULT_PARALLELISM
    backoff_base: float = DEFAULT_BACKOFF_BASE
    script: str = ""  # mock backend: path to a JSONL reply script


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: str = "sessions"
    host: str = "127.0.0.1"
    port: int = 8000


@dataclass(frozen=True)
class PipelineConfig:
    strategy: str = Strategy.TIDD_EC_CHAIN.value
    max_repairs: int = DEFAULT_MAX_REPAIRS
    judge_runs: int = 3


@dataclass(frozen=True)
class AppConfig:
    llm: BackendConfig = field(default_factory=BackendConfig)
    judges: tuple[BackendConfig, ...] = ()
    embed: BackendConfig = field(default_factory=BackendConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> AppConfig:
    environ = os.environ if env is None else env
    parser = configparser.ConfigParser()
    if path is not None:
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")

    llm = _backend_from(parser, "llm", environ, "LLM")
    judge_sections = sorted(
        (s for s in parser.sections() if _JUDGE_SECTION_RE.match(s)),
        key=lambda s: int(s[5:] or "1"),
    )
    judges = tuple(_backend_from(parser, s, environ, "JUDGE" if s == "judge" else None) for s in judge_sections)
    if not judges and environ.get("JUDGE_BASE_URL"):
        judges = (_backend_from(parser, "judge", environ, "JUDGE"),)
    embed = _backend_from(parser, "embed", environ, "EMBED")

    service = ServiceConfig(
        data_dir=_get(parser, "service", "data_dir", "sessions"),
        host=_get(parser, "service", "host", "127.0.0.1"),
        port=int(_get(parser, "service", "port", "8000")),
    )
    pipeline = PipelineConfig(
        strategy=Strategy(_get(parser, "pipeline", "strategy", Strategy.TIDD_EC_CHAIN.value)).value,
        max_repairs=int(_get(parser, "pipeline", "max_repairs", str(DEFAULT_MAX_REPAIRS))),
        judge_runs=int(_get(parser, "pipeline", "judge_runs", "3")),
    )
    return AppConfig(llm=llm, judges=judges, embed=embed, service=service, pipeline=pipeline)


def _get(parser: configparser.ConfigParser, section: str, option: str, default: str) -> str:
    if parser.has_option(section, option):
        return parser.get(section, option)
    return default


def _backend_from(
    parser: configparser.ConfigParser,
    section: str,
    environ: dict[str, str],
    env_prefix: str | None,
) -> BackendConfig:
    has_section = parser.has_section(section)
    get = lambda option, default: parser.get(section, option) if has_section and parser.has_option(section, option) else default  # noqa: E731

    base_url = get("base_url", "")
    api_key = get("api_key", "")
    model = get("model", "")
    if env_prefix:
        base_url = environ.get(f"{env_prefix}_BASE_URL", base_url)
        api_key = environ.get(f"{env_prefix}_API_KEY", api_key)
        model = environ.get(f"{env_prefix}_MODEL", model)

    backend = get("backend", "")
    if not backend:
        backend = "http" if base_url else "none"
    return BackendConfig(
        backend=backend,
        base_url=base_url,
        api_key=api_key,
        model=model,
        temperature=float(get("temperature", str(DEFAULT_TEMPERATURE))),
        max_tokens=int(get("max_tokens", str(DEFAULT_MAX_TOKENS))),
        timeout=float(get("timeout", str(DEFAULT_TIMEOUT))),
        max_retries=int(get("max_retries", str(DEFAULT_MAX_RETRIES))),
        parallelism_limit=int(get("parallelism_limit", str(DEFAULT_PARALLELISM))),
        backoff_base=float(get("backoff_base", str(DEFAULT_BACKOFF_BASE))),
        script=get("script", ""),
    )


class NullChatClient:
    """Placeholder for an unconfigured backend; any use reports unavailability."""

    def __init__(self, label: str) -> None:
        self.label = label

    def complete(self, request: Any) -> Any:
        raise LlmUnavailable(f"no {self.label} backend is configured")

    def embed(self, texts: list[str]) -> list[list[float]]:
        raise LlmUnavailable(f"no {self.label} backend is configured")


def make_client(cfg: BackendConfig, label: str = "llm") -> ChatClient:
    if cfg.backend == "none":
        return NullChatClient(label)
    if cfg.backend == "mock":
        return MockChatClient(script=_load_script(cfg.script) if cfg.script else None)
    if cfg.backend == "http":
        return HttpChatClient(
            ClientConfig(
                base_url=cfg.base_url,
                api_key=cfg.api_key,
                model=cfg.model,
                temperature=cfg.temperature,
                max_tokens=cfg.max_tokens,
                timeout=cfg.timeout,
                max_retries=cfg.max_retries,
                parallelism_limit=cfg.parallelism_limit,
                backoff_base=cfg.backoff_base,
            )
        )
    raise ValueError(f"unknown backend {cfg.backend!r} for {label}")


def _load_script(path: str) -> list[str | dict[str, Any]]:
    entries: list[str | dict[str, Any]] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            value = json.loads(line)
            if isinstance(value, str):
                entries.append(value)
            elif isinstance(value, dict):
                entries.append(value)
            else:
                raise ValueError(f"script entries must be strings or objects, got {type(value).__name__}")
    return entries


def make_embed_fn(cfg: BackendConfig) -> Callable[[list[str]], list[list[float]]] | None:
    if cfg.backend == "none":
        return None
    client = make_client(cfg, label="embed")
    return client.embed
