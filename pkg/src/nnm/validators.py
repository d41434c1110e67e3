"""Response validators: ground-truth checks applied before items join the map."""

from __future__ import annotations

import threading
from typing import Iterable, Protocol
from urllib.parse import quote

import httpx

from .graph import normalize_name

DEFAULT_SUMMARY_URL = "https://en.wikipedia.org/api/rest_v1/page/summary/{title}"


class ValidatorError(RuntimeError):
    """The validator could not decide (network failure etc.); not a 'no'."""


class ResponseValidator(Protocol):
    def is_valid(self, item: str) -> bool: ...


class AcceptAllValidator:
    def is_valid(self, item: str) -> bool:
        return True


class AllowlistValidator:
    """Accepts only items whose normalized name is on the list."""

    def __init__(self, names: Iterable[str]):
        self.names = {normalize_name(n) for n in names}

    def is_valid(self, item: str) -> bool:
        return normalize_name(item) in self.names


class PageExistenceValidator:
    """Checks a REST summary endpoint for the item's page; caches results.

    2xx means the page exists, 404 means it does not; anything else raises
    ValidatorError so callers can distinguish "unknown" from "no".
    """

    def __init__(
        self,
        url_pattern: str = DEFAULT_SUMMARY_URL,
        timeout: float = 10.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if "{title}" not in url_pattern:
            raise ValueError("url_pattern must contain a {title} placeholder")
        self.url_pattern = url_pattern
        self._client = httpx.Client(timeout=timeout, transport=transport, follow_redirects=True)
        self._cache: dict[str, bool] = {}
        self._lock = threading.Lock()

    def is_valid(self, item: str) -> bool:
        if not item:
            raise ValueError("empty title")
        key = normalize_name(item)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        url = self.url_pattern.format(title=quote(item, safe=""))
        try:
            resp = self._client.get(url)
        except httpx.HTTPError as exc:
            raise ValidatorError(f"page lookup failed for {item!r}: {exc}") from exc
        if resp.status_code == 404:
            exists = False
        elif 200 <= resp.status_code < 300:
            exists = True
        else:
            raise ValidatorError(f"page lookup for {item!r} returned {resp.status_code}")
        with self._lock:
            self._cache[key] = exists
        return exists
