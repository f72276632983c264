"""Text-generation backends.

Every pipeline stage works without a backend; when one is configured the
stage asks it first and falls back to its rule-based path on any failure.
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

log = logging.getLogger(__name__)

ENV_BASE_URL = "REVAC_BACKEND_URL"
ENV_API_KEY = "REVAC_BACKEND_KEY"
ENV_MODEL = "REVAC_BACKEND_MODEL"


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    max_tokens: int = 512
    temperature: float = 0.7
    seed: Optional[int] = None


@dataclass(frozen=True)
class Segment:
    name: str
    lines: tuple[str, ...]
    # only public chat may be dropped to fit the budget; facts never are
    truncatable: bool = False

    def render(self) -> str:
        return f"## {self.name}\n" + "\n".join(self.lines)


@dataclass(frozen=True)
class BackendRequest:
    system: str
    segments: tuple[Segment, ...]
    params: GenerationParams = field(default_factory=GenerationParams)

    def prompt(self) -> str:
        return "\n\n".join(s.render() for s in self.segments)

    def size(self) -> int:
        return len(self.system) + len(self.prompt())


@dataclass(frozen=True)
class BackendResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


class Backend(Protocol):
    def generate(self, request: BackendRequest) -> BackendResponse: ...


def build_request(
    system: str,
    segments: Sequence[Segment],
    budget_chars: int,
    params: GenerationParams = GenerationParams(),
) -> BackendRequest:
    """Assemble a request, dropping the oldest truncatable lines until it fits."""
    segs = [Segment(s.name, tuple(s.lines), s.truncatable) for s in segments]
    request = BackendRequest(system, tuple(segs), params)
    overflow = request.size() - budget_chars
    for i, seg in enumerate(segs):
        if overflow <= 0:
            break
        if not seg.truncatable:
            continue
        lines = list(seg.lines)
        while lines and overflow > 0:
            overflow -= len(lines.pop(0)) + 1
        segs[i] = Segment(seg.name, tuple(lines), True)
    return BackendRequest(system, tuple(segs), params)


def call_with_retries(
    backend: Backend,
    request: BackendRequest,
    retries: int = 2,
    base_delay: float = 0.25,
    rng: Optional[random.Random] = None,
) -> Optional[BackendResponse]:
    """One call plus ``retries`` retries with jittered exponential backoff; None if all fail."""
    rng = rng or random.Random()
    for attempt in range(retries + 1):
        try:
            return backend.generate(request)
        except Exception as exc:  # any backend fault degrades to the rule path
            log.debug("backend attempt %d failed: %s", attempt + 1, exc)
            if attempt < retries and base_delay > 0:
                time.sleep(base_delay * (2**attempt) * (0.5 + rng.random()))
    return None


class CannedBackend:
    """Returns fixed responses in rotation; for tests and offline demos."""

    def __init__(self, responses: Sequence[str]):
        if not responses:
            raise ValueError("need at least one response")
        self.responses = list(responses)
        self.calls = 0
        self._lock = threading.Lock()

    def generate(self, request: BackendRequest) -> BackendResponse:
        with self._lock:
            text = self.responses[self.calls % len(self.responses)]
            self.calls += 1
        return BackendResponse(text, len(request.prompt()) // 4, len(text) // 4)


class FlakyBackend:
    """Wraps another backend and fails a seeded fraction of calls."""

    def __init__(self, inner: Backend, failure_rate: float, seed: int = 0):
        self.inner = inner
        self.failure_rate = failure_rate
        self._rng = random.Random(seed)
        self._lock = threading.Lock()
        self.failures = 0

    def generate(self, request: BackendRequest) -> BackendResponse:
        with self._lock:
            fail = self._rng.random() < self.failure_rate
            if fail:
                self.failures += 1
        if fail:
            raise BackendError("injected failure")
        return self.inner.generate(request)


class TracingBackend:
    """Appends every request/response pair to a JSONL trace file."""

    def __init__(self, inner: Backend, path: Path):
        self.inner = inner
        self.path = Path(path)
        self._lock = threading.Lock()

    def generate(self, request: BackendRequest) -> BackendResponse:
        record = {"system": request.system, "prompt": request.prompt(),
                  "params": request.params.__dict__}
        try:
            response = self.inner.generate(request)
            record["response"] = response.text
            return response
        except Exception as exc:
            record["error"] = repr(exc)
            raise
        finally:
            with self._lock, self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")


class ChatCompletionsBackend:
    """OpenAI-compatible ``/chat/completions`` client using only the stdlib."""

    def __init__(self, base_url: str, model: str, api_key: str = "", timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout

    @classmethod
    def from_env(cls, base_url: Optional[str] = None, model: Optional[str] = None) -> "ChatCompletionsBackend":
        url = os.environ.get(ENV_BASE_URL, base_url or "")
        name = os.environ.get(ENV_MODEL, model or "")
        if not url or not name:
            raise BackendError(f"set {ENV_BASE_URL} and {ENV_MODEL} (or configure base_url/model)")
        return cls(url, name, os.environ.get(ENV_API_KEY, ""))

    def generate(self, request: BackendRequest) -> BackendResponse:
        body = {
            "model": self.model,
            "messages": [{"role": "system", "content": request.system},
                         {"role": "user", "content": request.prompt()}],
            "max_tokens": request.params.max_tokens,
            "temperature": request.params.temperature,
        }
        if request.params.seed is not None:
            body["seed"] = request.params.seed
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(f"{self.base_url}/chat/completions", json.dumps(body).encode(), headers)
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                data = json.loads(resp.read().decode())
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise BackendError(str(exc)) from exc
        try:
            text = data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed response: {data!r:.200}") from exc
        usage = data.get("usage") or {}
        return BackendResponse(text, int(usage.get("prompt_tokens", 0)), int(usage.get("completion_tokens", 0)))
