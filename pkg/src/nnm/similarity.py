"""Sentence-embedding similarity: "find closest" ranking and agent placement.

Two embedders: a remote client for an OpenAI-compatible embeddings endpoint,
and a hermetic fallback that hashes lowercase word tokens into a fixed-width
term-frequency vector. Scores are cosine similarity clamped to [0, 1].
"""

from __future__ import annotations

import hashlib
import os
import string
import threading
import time
from typing import Protocol, Sequence

import httpx
import numpy as np

_EDGE_CHARS = string.punctuation + "“”‘’…«»"


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens: whitespace split, punctuation stripped off the edges."""
    tokens = []
    for raw in text.split():
        t = raw.strip(_EDGE_CHARS).lower()
        if t:
            tokens.append(t)
    return tokens


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedBagEmbedder:
    """Deterministic fallback embedder: hashed bag of tokens with tf weights."""

    def __init__(self, dimension: int = 512):
        self.dimension = dimension

    def bucket(self, token: str) -> int:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in tokenize(text):
            vec[self.bucket(token)] += 1.0
        return vec


class EmbedderError(RuntimeError):
    """The embedding backend failed to produce a vector."""


class RemoteEmbedder:
    """Client for an OpenAI-compatible /embeddings endpoint.

    Configured by NNM_API_BASE / NNM_MODEL / NNM_API_KEY. Results are cached
    by exact text; the cache is shared safely between threads.
    """

    def __init__(
        self,
        base_url: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        self.base_url = (base_url or os.getenv("NNM_API_BASE", "")).rstrip("/")
        self.model = model or os.getenv("NNM_MODEL", "")
        self.api_key = api_key or os.getenv("NNM_API_KEY", "")
        if not self.base_url:
            raise EmbedderError("no embeddings endpoint configured (set NNM_API_BASE)")
        self.dimension = 0  # learned from the first response
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._sleep = sleep
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def embed(self, text: str) -> np.ndarray:
        with self._lock:
            cached = self._cache.get(text)
        if cached is not None:
            return cached
        vec = self._fetch(text)
        with self._lock:
            if self.dimension == 0:
                self.dimension = vec.shape[0]
            self._cache[text] = vec
        return vec

    def _fetch(self, text: str) -> np.ndarray:
        url = f"{self.base_url}/embeddings"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model, "input": text}
        last_err: Exception | None = None
        for attempt in range(3):
            if attempt:
                self._sleep(2 ** (attempt - 1))
            try:
                resp = self._client.post(url, headers=headers, json=payload)
                if resp.status_code >= 400:
                    raise EmbedderError(f"embeddings endpoint returned {resp.status_code}")
                data = resp.json()["data"][0]["embedding"]
                return np.asarray(data, dtype=np.float64)
            except (httpx.HTTPError, KeyError, IndexError, ValueError, EmbedderError) as exc:
                last_err = exc
        raise EmbedderError(f"embedding request failed after 3 attempts: {last_err}")


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def similarity(a: str, b: str, embedder: Embedder) -> float:
    """Cosine similarity of the two texts' embeddings, clamped to [0, 1]."""
    if not a.strip() or not b.strip():
        raise ValueError("similarity requires two non-empty texts")
    value = _cosine(embedder.embed(a), embedder.embed(b))
    return min(1.0, max(0.0, value))


def find_closest(
    query: str,
    candidates: Sequence[tuple[int, str]],
    embedder: Embedder,
    k: int,
) -> list[tuple[int, float]]:
    """Top-k candidates by similarity to the query; ties break by ascending id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not candidates:
        raise ValueError("no candidates to rank")
    scored = [(cid, similarity(query, text, embedder)) for cid, text in candidates]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
