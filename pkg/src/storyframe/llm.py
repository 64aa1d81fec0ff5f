"""Chat-completion and embedding clients.

``HttpChatClient`` speaks the common chat-completions wire format: POST
``{base_url}/chat/completions`` and ``{base_url}/embeddings`` with a bearer
key. Transient failures (HTTP 5xx, 429, transport errors, timeouts) are
retried with exponential backoff; other 4xx fail immediately. A semaphore
caps concurrent requests per client.

``MockChatClient`` replays a script or a responder callable, byte-for-byte
deterministic, and records every request it sees. The whole pipeline is
tested against it, and the service can run on it via configuration.
"""

from __future__ import annotations

import hashlib
import math
import os
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Protocol, Sequence

import requests

from .errors import HttpError, InvalidResponse, LlmClientError, RateLimited, Timeout

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 2048
DEFAULT_TIMEOUT = 60.0
DEFAULT_MAX_RETRIES = 3
DEFAULT_PARALLELISM = 4
DEFAULT_BACKOFF_BASE = 0.5


@dataclass(frozen=True)
class ClientConfig:
    base_url: str
    api_key: str = ""
    model: str = ""
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES
    parallelism_limit: int = DEFAULT_PARALLELISM
    backoff_base: float = DEFAULT_BACKOFF_BASE

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ValueError("base_url is required")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.parallelism_limit < 1:
            raise ValueError("parallelism_limit must be >= 1")

    def __repr__(self) -> str:  # the key never appears in logs or tracebacks
        key = "***" if self.api_key else ""
        return (
            f"ClientConfig(base_url={self.base_url!r}, api_key={key!r}, model={self.model!r}, "
            f"temperature={self.temperature!r}, max_tokens={self.max_tokens!r}, timeout={self.timeout!r}, "
            f"max_retries={self.max_retries!r}, parallelism_limit={self.parallelism_limit!r}, "
            f"backoff_base={self.backoff_base!r})"
        )

    @classmethod
    def from_env(cls, prefix: str = "LLM", **overrides: Any) -> "ClientConfig":
        base_url = os.environ.get(f"{prefix}_BASE_URL", "")
        config = cls(
            base_url=base_url or overrides.pop("base_url", ""),
            api_key=os.environ.get(f"{prefix}_API_KEY", ""),
            model=os.environ.get(f"{prefix}_MODEL", ""),
        )
        return replace(config, **overrides) if overrides else config


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float | None = None
    max_tokens: int | None = None

    def __post_init__(self) -> None:
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("a chat request needs at least one user message")


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str = "stop"
    usage: dict[str, int] = field(default_factory=dict)


def user_request(prompt: str, system: str | None = None, **kwargs: Any) -> ChatRequest:
    messages: list[ChatMessage] = []
    if system:
        messages.append(ChatMessage("system", system))
    messages.append(ChatMessage("user", prompt))
    return ChatRequest(messages=tuple(messages), **kwargs)


class ChatClient(Protocol):
    def complete(self, request: ChatRequest) -> ChatResponse: ...

    def embed(self, texts: list[str]) -> list[list[float]]: ...


class HttpChatClient:
    def __init__(self, config: ClientConfig, session: requests.Session | None = None) -> None:
        self.config = config
        self._session = session or requests.Session()
        self._semaphore = threading.Semaphore(config.parallelism_limit)
        self.attempt_log: list[dict[str, Any]] = []
        self._sleep = time.sleep  # swapped out in tests

    # -- wire calls ----------------------------------------------------------

    def complete(self, request: ChatRequest) -> ChatResponse:
        payload = {
            "model": self.config.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": self.config.temperature if request.temperature is None else request.temperature,
            "max_tokens": self.config.max_tokens if request.max_tokens is None else request.max_tokens,
        }
        body = self._post("chat/completions", payload)
        try:
            choice = body["choices"][0]
            content = choice["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise InvalidResponse("chat response carries no message content") from None
        if not isinstance(content, str):
            raise InvalidResponse(f"message content must be a string, got {type(content).__name__}")
        return ChatResponse(
            content=content,
            finish_reason=str(choice.get("finish_reason") or "stop"),
            usage={k: v for k, v in (body.get("usage") or {}).items() if isinstance(v, int)},
        )

    def embed(self, texts: list[str]) -> list[list[float]]:
        if not texts:
            return []
        body = self._post("embeddings", {"model": self.config.model, "input": list(texts)})
        try:
            rows = sorted(body["data"], key=lambda row: row["index"])
            vectors = [[float(x) for x in row["embedding"]] for row in rows]
        except (KeyError, TypeError, ValueError):
            raise InvalidResponse("embedding response carries no vectors") from None
        if len(vectors) != len(texts):
            raise InvalidResponse(f"expected {len(texts)} embeddings, got {len(vectors)}")
        return vectors

    # -- transport -----------------------------------------------------------

    def _post(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        url = f"{self.config.base_url.rstrip('/')}/{path}"
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        with self._semaphore:
            for attempt in range(attempts):
                if attempt:
                    self._sleep(self.config.backoff_base * (2 ** (attempt - 1)))
                try:
                    response = self._session.post(
                        url, json=payload, headers=headers, timeout=self.config.timeout
                    )
                except requests.Timeout:
                    last_error = Timeout(f"request to {url} timed out after {self.config.timeout}s")
                    self.attempt_log.append({"url": url, "attempt": attempt, "error": "timeout"})
                    continue
                except requests.RequestException as exc:
                    last_error = LlmClientError(f"transport failure talking to {url}: {exc}")
                    self.attempt_log.append({"url": url, "attempt": attempt, "error": "transport"})
                    continue
                self.attempt_log.append({"url": url, "attempt": attempt, "status": response.status_code})
                if response.status_code == 429:
                    last_error = RateLimited(f"{url} rate limited the request")
                    continue
                if response.status_code >= 500:
                    last_error = HttpError(response.status_code, f"{url} failed")
                    continue
                if response.status_code >= 400:
                    raise HttpError(response.status_code, f"{url} rejected the request")
                try:
                    body = response.json()
                except ValueError:
                    raise InvalidResponse(f"{url} returned a non-JSON body") from None
                if not isinstance(body, dict):
                    raise InvalidResponse(f"{url} returned {type(body).__name__}, expected an object")
                return body
        assert last_error is not None
        raise last_error


class MockChatClient:
    """Deterministic stand-in for a chat backend.

    ``script`` entries are consumed in order; each is a content string, a
    dict of :class:`ChatResponse` fields, or an exception to raise. A
    ``responder`` callable computes the reply from the request instead.
    """

    def __init__(
        self,
        script: Sequence[str | dict[str, Any] | Exception] | None = None,
        responder: Callable[[ChatRequest], str | dict[str, Any]] | None = None,
        embed_script: Sequence[Sequence[Sequence[float]]] | None = None,
        embed_dim: int = 8,
    ) -> None:
        if script is not None and responder is not None:
            raise ValueError("pass either a script or a responder, not both")
        self._script = list(script) if script is not None else None
        self._responder = responder
        self._embed_script = [
            [[float(x) for x in vec] for vec in batch] for batch in embed_script
        ] if embed_script is not None else None
        self._embed_dim = embed_dim
        self.requests: list[ChatRequest] = []
        self.embed_requests: list[list[str]] = []
        self._lock = threading.Lock()
        self._in_flight = 0
        self.max_in_flight = 0

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self._in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self._in_flight)
            self.requests.append(request)
        try:
            if self._responder is not None:
                entry: str | dict[str, Any] | Exception = self._responder(request)
            else:
                with self._lock:
                    if not self._script:
                        raise LlmClientError("mock script exhausted")
                    entry = self._script.pop(0)
            if isinstance(entry, Exception):
                raise entry
            if isinstance(entry, str):
                return ChatResponse(content=entry)
            return ChatResponse(**entry)
        finally:
            with self._lock:
                self._in_flight -= 1

    def embed(self, texts: list[str]) -> list[list[float]]:
        with self._lock:
            self.embed_requests.append(list(texts))
            if self._embed_script is not None:
                if not self._embed_script:
                    raise LlmClientError("mock embed script exhausted")
                batch = self._embed_script.pop(0)
                if len(batch) != len(texts):
                    raise LlmClientError(f"scripted embed batch expects {len(batch)} texts, got {len(texts)}")
                return [list(vec) for vec in batch]
        return [_hash_vector(text, self._embed_dim) for text in texts]


def _hash_vector(text: str, dim: int) -> list[float]:
    """Stable pseudo-embedding: unit vector derived from the text digest."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    raw = []
    for i in range(dim):
        chunk = digest[(4 * i) % len(digest) : (4 * i) % len(digest) + 4]
        raw.append(int.from_bytes(chunk, "big") / 2**32 - 0.5)
    norm = math.sqrt(sum(x * x for x in raw)) or 1.0
    return [x / norm for x in raw]
