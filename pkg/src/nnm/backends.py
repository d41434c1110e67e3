"""Text-generation backends: remote OpenAI-compatible, fixture, and recording."""

from __future__ import annotations

import os
import time
from typing import Mapping, Protocol

import httpx


class BackendError(RuntimeError):
    """The generation backend could not produce a response."""


class GenerationBackend(Protocol):
    def generate(self, prompt: str) -> str: ...


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
            if nxt == "t":
                out.append("\t")
                i += 2
                continue
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


class FixtureBackend:
    """Deterministic canned responses keyed by seed (or by exact prompt).

    Lookup tries the exact prompt first, then the longest table key contained
    in the prompt, so rendered prompts resolve to their seed's entry.
    """

    def __init__(self, table: Mapping[str, str]):
        self.table = dict(table)

    @classmethod
    def from_file(cls, path: str) -> FixtureBackend:
        """Load `seed<TAB>response` lines; \\n, \\t, \\\\ escapes in the response."""
        table: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                if "\t" not in line:
                    raise ValueError(f"{path}:{lineno}: expected seed<TAB>response")
                seed, response = line.split("\t", 1)
                table[seed] = _unescape(response)
        return cls(table)

    def generate(self, prompt: str) -> str:
        if prompt in self.table:
            return self.table[prompt]
        best: str | None = None
        for key in self.table:
            if key and key in prompt:
                if best is None or (len(key), key) > (len(best), best):
                    best = key
        if best is None:
            raise BackendError(f"fixture backend has no entry matching prompt {prompt!r}")
        return self.table[best]


class RecordingBackend:
    """Wraps a backend and records prompt/response pairs for later replay."""

    def __init__(self, inner: GenerationBackend):
        self.inner = inner
        self.recorded: dict[str, str] = {}

    def generate(self, prompt: str) -> str:
        response = self.inner.generate(prompt)
        self.recorded[prompt] = response
        return response

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for prompt, response in self.recorded.items():
                fh.write(f"{_escape(prompt)}\t{_escape(response)}\n")

    def replay(self) -> FixtureBackend:
        return FixtureBackend(dict(self.recorded))


class OpenAICompletionBackend:
    """Client for an OpenAI-compatible /completions endpoint.

    Configured by NNM_API_BASE / NNM_MODEL / NNM_API_KEY. Retries three times
    with exponential backoff starting at one second. The underlying client is
    thread-safe, so one instance can serve concurrent build sessions.
    """

    def __init__(
        self,
        base_url: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        max_tokens: int = 256,
        temperature: float | None = None,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        self.base_url = (base_url or os.getenv("NNM_API_BASE", "")).rstrip("/")
        self.model = model or os.getenv("NNM_MODEL", "")
        self.api_key = api_key or os.getenv("NNM_API_KEY", "")
        if not self.base_url:
            raise BackendError("no completions endpoint configured (set NNM_API_BASE)")
        self.max_tokens = max_tokens
        self.temperature = temperature
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._sleep = sleep

    def generate(self, prompt: str) -> str:
        url = f"{self.base_url}/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload: dict = {"model": self.model, "prompt": prompt, "max_tokens": self.max_tokens}
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        last_err: Exception | None = None
        for attempt in range(3):
            if attempt:
                self._sleep(2 ** (attempt - 1))
            try:
                resp = self._client.post(url, headers=headers, json=payload)
                if resp.status_code >= 400:
                    raise BackendError(f"completions endpoint returned {resp.status_code}")
                return str(resp.json()["choices"][0]["text"])
            except (httpx.HTTPError, KeyError, IndexError, ValueError, BackendError) as exc:
                last_err = exc
        raise BackendError(f"completion request failed after 3 attempts: {last_err}")
