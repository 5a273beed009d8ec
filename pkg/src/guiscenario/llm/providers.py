"""LLM providers: a deterministic scripted replayer and an HTTP chat-completions client."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx
import yaml

from ..errors import ConfigError, LlmError, LlmTimeout, ScriptExhausted
from .messages import LlmRequest, LlmResponse, Stage, Usage


class Provider(Protocol):
    def complete(self, req: LlmRequest) -> LlmResponse: ...


@dataclass(frozen=True)
class ScriptEntry:
    stage: Stage
    response_text: str
    usage: Usage = Usage()
    # Optional prompt id the request must carry, for scripts that want to be strict.
    prompt: str | None = None

    def to_dict(self) -> dict:
        d = {"stage": self.stage.value, "response_text": self.response_text, "usage": self.usage.to_dict()}
        if self.prompt:
            d["prompt"] = self.prompt
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ScriptEntry:
        try:
            stage = Stage(d["stage"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"script entry has a bad stage: {d.get('stage')!r}") from exc
        if "response_text" not in d:
            raise ConfigError("script entry lacks response_text")
        return cls(stage, str(d["response_text"]), Usage.from_dict(d.get("usage")), d.get("prompt"))


def load_script(path) -> list[ScriptEntry]:
    text = Path(path).read_text()
    data = yaml.safe_load(text) if str(path).endswith((".yaml", ".yml")) else json.loads(text)
    if isinstance(data, dict):
        data = data.get("entries", [])
    if not isinstance(data, list):
        raise ConfigError(f"{path}: script must be a list of entries")
    return [ScriptEntry.from_dict(e) for e in data]


class ScriptedProvider:
    """Replays pre-authored replies in order.

    The next entry must carry the requested stage (and prompt id, when the
    entry names one); otherwise the script is considered out of sync and
    :class:`ScriptExhausted` is raised. Every request is kept in
    ``requests`` for later assertions.
    """

    def __init__(self, entries):
        self.entries = [e if isinstance(e, ScriptEntry) else ScriptEntry.from_dict(e) for e in entries]
        self.position = 0
        self.requests: list[LlmRequest] = []
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path) -> ScriptedProvider:
        return cls(load_script(path))

    @property
    def remaining(self) -> int:
        return len(self.entries) - self.position

    def complete(self, req: LlmRequest) -> LlmResponse:
        with self._lock:
            self.requests.append(req)
            if self.position >= len(self.entries):
                raise ScriptExhausted(f"script exhausted at request {len(self.requests)} ({req.stage.value})")
            entry = self.entries[self.position]
            if entry.stage is not req.stage or (entry.prompt and entry.prompt != req.prompt):
                want = entry.prompt or entry.stage.value
                got = req.prompt or req.stage.value
                raise ScriptExhausted(f"script mismatch at entry {self.position}: expected {want}, got {got}")
            self.position += 1
        return LlmResponse(entry.response_text, entry.usage)


class HttpProvider:
    """Chat-completions style endpoint with base64 PNG image parts."""

    def __init__(self, endpoint: str, model: str, api_key_env: str = "OPENAI_API_KEY",
                 timeout: float = 60.0, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def payload(self, req: LlmRequest) -> dict:
        content = [{"type": "text", "text": req.text}]
        for img in req.images:
            content.append({"type": "image_url", "image_url": {"url": "data:image/png;base64," + img.to_b64()}})
        return {
            "model": self.model,
            "temperature": 0,
            "max_tokens": req.max_tokens,
            "messages": [{"role": "user", "content": content}],
        }

    def complete(self, req: LlmRequest) -> LlmResponse:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = self._client.post(self.endpoint, json=self.payload(req), headers=headers)
            resp.raise_for_status()
            body = resp.json()
        except httpx.TimeoutException as exc:
            raise LlmTimeout(f"{self.endpoint} timed out after {self.timeout}s") from exc
        except (httpx.HTTPError, ValueError) as exc:
            raise LlmError(f"{self.endpoint}: {exc}") from exc
        try:
            text = body["choices"][0]["message"]["content"]
            usage = body.get("usage") or {}
            return LlmResponse(text or "", Usage(int(usage.get("prompt_tokens", 0)),
                                                 int(usage.get("completion_tokens", 0))))
        except (KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"unexpected response shape from {self.endpoint}") from exc


def provider_from_selector(selector: str, *, model: str = "", timeout: float = 60.0,
                           api_key_env: str = "OPENAI_API_KEY"):
    """``scripted:<path>`` or ``http:<endpoint url>``."""
    kind, _, arg = selector.partition(":")
    if kind == "scripted" and arg:
        return ScriptedProvider.from_file(arg)
    if kind == "http" and arg:
        if not model:
            raise ConfigError("http provider needs a model name")
        return HttpProvider(arg, model, api_key_env=api_key_env, timeout=timeout)
    raise ConfigError(f"bad provider selector {selector!r}")
