"""Provider-agnostic chat backends: a scripted mock and a live HTTP client.

The mock replays an authored script of {expect, respond} entries, which is
how every end-to-end test runs. The HTTP backend posts a generic JSON chat
payload and retries with backoff; it exists for live deployments and is
exercised in tests only through a fake transport.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import httpx
import yaml

from ..errors import ProviderError
from .context import PromptBundle


@dataclass
class AgentMessage:
    """One model turn: text, optional reasoning, optional tool calls."""

    text: str = ""
    reasoning: str = ""
    tool_calls: list[dict] = field(default_factory=list)  # {name, arguments}
    classification: dict | None = None
    intent: dict | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "AgentMessage":
        return cls(
            text=data.get("text", ""),
            reasoning=data.get("reasoning", ""),
            tool_calls=list(data.get("tool_calls", [])),
            classification=data.get("classification"),
            intent=data.get("intent"),
        )


class MockScriptBackend:
    """Deterministic stand-in replaying authored agent turns in order.

    Script format: ordered list of {expect, respond}. The expect matcher
    checks the role and/or a substring of the last message; respond is the
    agent turn to return. Also keeps prompt-cache accounting: static bytes
    count as transmitted only the first time a cache key is seen.
    """

    def __init__(self, script: list[dict]):
        self.script = list(script)
        self.cursor = 0
        self.seen_cache_keys: set[str] = set()
        self.static_bytes_sent = 0
        self.dynamic_bytes_sent = 0

    @classmethod
    def from_file(cls, path: Path | str) -> "MockScriptBackend":
        payload = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if not isinstance(payload, list):
            raise ValueError("mock script must be a list of {expect, respond} entries")
        return cls(payload)

    def _account(self, bundle: PromptBundle) -> None:
        if bundle.cache_key not in self.seen_cache_keys:
            self.seen_cache_keys.add(bundle.cache_key)
            self.static_bytes_sent += bundle.static_bytes
        self.dynamic_bytes_sent += sum(len(s.encode()) for s in bundle.dynamic_sections)

    def complete(self, bundle: PromptBundle, last_message: dict) -> AgentMessage:
        self._account(bundle)
        if self.cursor >= len(self.script):
            raise ProviderError("mock script exhausted")
        entry = self.script[self.cursor]
        self.cursor += 1
        expect = entry.get("expect") or {}
        role = expect.get("role")
        if role is not None and last_message.get("role") != role:
            raise ProviderError(
                f"mock script entry {self.cursor - 1} expected role {role!r}, "
                f"got {last_message.get('role')!r}"
            )
        contains = expect.get("contains")
        if contains is not None and contains not in json.dumps(last_message, sort_keys=True):
            raise ProviderError(
                f"mock script entry {self.cursor - 1} expected {contains!r} in the last message"
            )
        return AgentMessage.from_dict(entry.get("respond") or {})


class HttpBackend:
    """Minimal JSON-over-HTTP chat client with bounded retries."""

    def __init__(
        self,
        url: str,
        api_key: str = "",
        attempts: int = 3,
        backoff_s: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        self.url = url
        self.api_key = api_key
        self.attempts = attempts
        self.backoff_s = backoff_s
        self._client = httpx.Client(transport=transport, timeout=60.0)

    def complete(self, bundle: PromptBundle, last_message: dict) -> AgentMessage:
        payload: dict[str, Any] = {
            "cache_key": bundle.cache_key,
            "static": bundle.static_sections,
            "dynamic": bundle.dynamic_sections,
            "last_message": last_message,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            try:
                response = self._client.post(self.url, json=payload, headers=headers)
                response.raise_for_status()
                return AgentMessage.from_dict(response.json())
            except Exception as exc:
                last_error = exc
                if attempt + 1 < self.attempts:
                    time.sleep(self.backoff_s * (2**attempt))
        raise ProviderError(
            f"provider unreachable after {self.attempts} attempts: {last_error}"
        )
