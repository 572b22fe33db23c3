"""Single door to the text-completion provider.

Generation, refinement, and judging all pass through Gateway.complete,
which enforces a concurrent-request cap and emits exactly one audit log
record per call. Two providers ship: an HTTP provider speaking a
minimal chat-completion JSON schema, and a scripted mock whose strict
mode makes entire pipeline runs bit-reproducible.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import httpx

from .errors import (
    ProviderRejected,
    ProviderTimeout,
    TranscriptExhausted,
    TranscriptMismatch,
)
from .model import ProviderConfig

log = logging.getLogger("copyforge.gateway")

#: Retry policy for the HTTP provider.
HTTP_ATTEMPTS = 3
HTTP_BACKOFF_SECONDS = (1.0, 4.0)
HTTP_TIMEOUT_SECONDS = 30.0
_RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class CompletionRequest:
    """One prompt plus the tag used for transcript matching and audit logs.

    Tags are "generation", "refinement", or "judge:<criterion_id>".
    """

    prompt_text: str
    request_tag: str

    def __post_init__(self) -> None:
        if not self.prompt_text:
            raise ValueError("prompt_text must be non-empty")


class Provider(Protocol):
    def send(self, request: CompletionRequest) -> str: ...


@dataclass(frozen=True)
class TranscriptEntry:
    """Scripted response; tag may end in '*' to match a tag prefix, and
    contains (when set) must appear in the prompt text."""

    tag: str
    response: str
    contains: str | None = None

    def matches(self, request: CompletionRequest) -> bool:
        if self.tag.endswith("*"):
            if not request.request_tag.startswith(self.tag[:-1]):
                return False
        elif request.request_tag != self.tag:
            return False
        return self.contains is None or self.contains in request.prompt_text


@dataclass(frozen=True)
class MockTranscript:
    entries: tuple[TranscriptEntry, ...]
    strict: bool = True

    @classmethod
    def from_data(cls, data: Any) -> "MockTranscript":
        """Accepts a JSON array of entries or {"strict": bool, "entries": [...]}."""
        strict = True
        if isinstance(data, dict):
            strict = bool(data.get("strict", True))
            raw_entries = data["entries"]
        else:
            raw_entries = data
        entries = tuple(
            TranscriptEntry(
                tag=e["tag"], response=e["response"], contains=e.get("contains")
            )
            for e in raw_entries
        )
        return cls(entries=entries, strict=strict)


def load_transcript(path: str) -> MockTranscript:
    with open(path, encoding="utf-8") as fh:
        return MockTranscript.from_data(json.load(fh))


class MockProvider:
    """Replays a transcript. Strict mode consumes entries in order and
    rejects any out-of-order request; loose mode takes the first unused
    matching entry."""

    def __init__(self, transcript: MockTranscript):
        self._entries = list(transcript.entries)
        self._strict = transcript.strict
        self._used = [False] * len(self._entries)
        self._cursor = 0
        self._lock = threading.Lock()

    def send(self, request: CompletionRequest) -> str:
        with self._lock:
            if self._strict:
                if self._cursor >= len(self._entries):
                    raise TranscriptExhausted(
                        f"no transcript entry left for tag {request.request_tag!r}"
                    )
                entry = self._entries[self._cursor]
                if not entry.matches(request):
                    raise TranscriptMismatch(
                        f"request tag {request.request_tag!r} does not match "
                        f"transcript entry {self._cursor} (tag {entry.tag!r})"
                    )
                self._cursor += 1
                return entry.response
            for i, entry in enumerate(self._entries):
                if not self._used[i] and entry.matches(request):
                    self._used[i] = True
                    return entry.response
            raise TranscriptExhausted(
                f"no unused transcript entry matches tag {request.request_tag!r}"
            )

    @property
    def remaining(self) -> int:
        with self._lock:
            if self._strict:
                return len(self._entries) - self._cursor
            return sum(1 for used in self._used if not used)


class HttpProvider:
    """Minimal chat-completion client.

    POSTs {"model", "messages": [{"role": "user", "content": prompt}],
    "temperature", "max_tokens"} and reads choices[0].message.content.
    Timeouts, connection errors, and 429/5xx answers are retried with
    1s/4s backoff; other statuses fail immediately.
    """

    def __init__(
        self,
        config: ProviderConfig,
        client: httpx.Client | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        if not config.endpoint:
            raise ValueError("http provider requires an endpoint")
        self._config = config
        self._client = client or httpx.Client(timeout=HTTP_TIMEOUT_SECONDS)
        self._sleeper = sleeper
        self._headers = {"content-type": "application/json"}
        if config.credential_env:
            token = os.environ.get(config.credential_env, "")
            if token:
                self._headers["authorization"] = f"Bearer {token}"

    def send(self, request: CompletionRequest) -> str:
        payload = {
            "model": self._config.model_id,
            "messages": [{"role": "user", "content": request.prompt_text}],
            "temperature": self._config.temperature,
            "max_tokens": self._config.max_output_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(HTTP_ATTEMPTS):
            try:
                response = self._client.post(
                    self._config.endpoint, json=payload, headers=self._headers
                )
            except httpx.TimeoutException as exc:
                last_error = ProviderTimeout(f"request timed out: {exc}")
            except httpx.HTTPError as exc:
                last_error = ProviderTimeout(f"transport failure: {exc}")
            else:
                if response.status_code == 200:
                    return self._extract_text(response)
                detail = response.text[:200]
                rejected = ProviderRejected(response.status_code, detail)
                if response.status_code not in _RETRYABLE_STATUSES:
                    raise rejected
                last_error = rejected
            if attempt + 1 < HTTP_ATTEMPTS:
                self._sleeper(HTTP_BACKOFF_SECONDS[attempt])
        assert last_error is not None
        raise last_error

    @staticmethod
    def _extract_text(response: httpx.Response) -> str:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError):
            raise ProviderRejected(200, "response body missing choices[0].message.content")
        if not isinstance(text, str):
            raise ProviderRejected(200, "completion content is not a string")
        return text


class Gateway:
    """Caps concurrency and audits every completion call."""

    def __init__(self, provider: Provider, max_concurrency: int = 4):
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be at least 1")
        self._provider = provider
        self._gate = threading.BoundedSemaphore(max_concurrency)

    def complete(self, request: CompletionRequest) -> str:
        start = time.perf_counter()
        with self._gate:
            try:
                text = self._provider.send(request)
            except Exception as exc:
                latency_ms = (time.perf_counter() - start) * 1000.0
                log.info(
                    "request_tag=%s latency_ms=%.1f outcome=%s",
                    request.request_tag,
                    latency_ms,
                    type(exc).__name__,
                )
                raise
        latency_ms = (time.perf_counter() - start) * 1000.0
        log.info(
            "request_tag=%s latency_ms=%.1f outcome=ok",
            request.request_tag,
            latency_ms,
        )
        return text


def build_provider(config: ProviderConfig) -> Provider:
    if config.temperature < 0:
        raise ValueError("temperature must be >= 0")
    if config.provider_kind == "mock":
        if not config.transcript_path:
            raise ValueError("mock provider requires transcript_path")
        return MockProvider(load_transcript(config.transcript_path))
    if config.provider_kind == "http":
        return HttpProvider(config)
    raise ValueError(f"unknown provider_kind: {config.provider_kind!r}")


def build_gateway(config: ProviderConfig) -> Gateway:
    return Gateway(build_provider(config), max_concurrency=config.max_concurrency)
