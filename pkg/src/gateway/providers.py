from pathlib import Path
from typing import List, Optional, Protocol, Sequence, Union
import logging
import os
import threading
import time

import httpx

from ..errors import AuthError, ContextOverflow, RateLimited, ScriptExhausted, TransportError
from ..frontend import estimate_tokens
from .models import Completion, ProviderConfig

# Configure logging
logger = logging.getLogger(__name__)


class Provider(Protocol):
    name: str

    def send(self, prompt: str, cfg: ProviderConfig) -> Completion:
        ...


class HttpProvider:
    """One JSON chat-completion request per call, with the whole prompt as a single user message."""

    name = "http"

    def __init__(self, client: Optional[httpx.Client] = None):
        self._client = client

    def _payload(self, prompt: str, cfg: ProviderConfig) -> dict:
        payload = {"model": cfg.model, "messages": [{"role": "user", "content": prompt}]}
        if cfg.temperature is not None:
            payload["temperature"] = cfg.temperature
        return payload

    def send(self, prompt: str, cfg: ProviderConfig) -> Completion:
        api_key = os.getenv(cfg.api_key_env)
        if not api_key:
            raise AuthError(f"environment variable {cfg.api_key_env} is not set")

        started = time.monotonic()
        client = self._client or httpx.Client(timeout=cfg.timeout)
        try:
            response = client.post(cfg.endpoint, json=self._payload(prompt, cfg),
                                   headers={"Authorization": f"Bearer {api_key}"})
        except httpx.HTTPError as e:
            raise TransportError(f"{cfg.endpoint}: {e}") from e
        finally:
            if self._client is None:
                client.close()
        latency = (time.monotonic() - started) * 1000

        status = response.status_code
        if status in (401, 403):
            raise AuthError(f"{cfg.endpoint} rejected the API key ({status})")
        if status == 429:
            raise RateLimited(f"{cfg.endpoint} is rate limiting requests")
        if status >= 500:
            raise TransportError(f"{cfg.endpoint} returned {status}")
        if status >= 400:
            body = response.text
            if "context_length" in body or "maximum context" in body:
                raise ContextOverflow(f"prompt exceeds the context of {cfg.model}")
            raise TransportError(f"{cfg.endpoint} returned {status}: {body[:200]}")

        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransportError(f"unexpected response body from {cfg.endpoint}") from e
        usage = data.get("usage") or {}
        return Completion(
            text=text,
            prompt_tokens=usage.get("prompt_tokens", estimate_tokens(prompt)),
            completion_tokens=usage.get("completion_tokens", estimate_tokens(text)),
            latency=latency,
            provider=cfg.name,
        )


class MockProvider:
    """Scripted playback: call n returns response n."""

    name = "mock"

    def __init__(self, responses: Sequence[str]):
        self._responses: List[str] = list(responses)
        self._next = 0
        self._lock = threading.Lock()
        self.prompts: List[str] = []

    @classmethod
    def from_files(cls, paths: Sequence[Union[str, Path]]) -> "MockProvider":
        return cls([Path(p).read_text(encoding="utf-8") for p in paths])

    @property
    def calls(self) -> int:
        return self._next

    def send(self, prompt: str, cfg: ProviderConfig) -> Completion:
        with self._lock:
            if self._next >= len(self._responses):
                raise ScriptExhausted(f"mock script has only {len(self._responses)} responses")
            text = self._responses[self._next]
            self._next += 1
            self.prompts.append(prompt)
        return Completion(
            text=text,
            prompt_tokens=estimate_tokens(prompt),
            completion_tokens=estimate_tokens(text),
            latency=0.0,
            provider=self.name,
        )


def mock_provider(script: Sequence[Union[str, Path]]) -> MockProvider:
    return MockProvider.from_files(script)
