"""Iterative map building: prompt a generation backend, parse and validate the
responses, and grow the graph breadth-first from a seed queue."""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .backends import BackendError, GenerationBackend
from .graph import GENERATED, MapGraph, TopicText, normalize_name, utc_now
from .validators import ResponseValidator, ValidatorError

log = logging.getLogger(__name__)

MAX_PARSED_ITEMS = 32

_BULLET = re.compile(r"^(?:[-*•‣◦]+|\d+[.)])\s*")
_QUOTE_PAIRS = (('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’"), ("`", "`"))


class PromptTemplate:
    """A prompt string with exactly one `{}` placeholder for the seed."""

    def __init__(self, template: str):
        if template.count("{}") != 1:
            raise ValueError("prompt template must contain exactly one {} placeholder")
        self.template = template

    def render(self, seed: str) -> str:
        prefix, suffix = self.template.split("{}")
        return prefix + seed + suffix

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PromptTemplate) and other.template == self.template

    def __repr__(self) -> str:
        return f"PromptTemplate({self.template!r})"


def _strip_quote_pair(s: str) -> str:
    if len(s) >= 2:
        for open_q, close_q in _QUOTE_PAIRS:
            if s[0] == open_q and s[-1] == close_q:
                return s[1:-1]
    return s


def _strip_item(piece: str) -> str:
    prev = None
    s = piece
    while s != prev:
        prev = s
        s = s.strip()
        s = _BULLET.sub("", s)
        s = _strip_quote_pair(s)
        s = s.rstrip(".")
    return s


def parse_response(raw: str) -> list[str]:
    """Split a generation into candidate items.

    Splits on commas and line breaks; strips whitespace, bullets, surrounding
    quotes and trailing periods; drops empties; dedupes on normalized form
    keeping the first occurrence; caps the list at 32 items.
    """
    items: list[str] = []
    seen: set[str] = set()
    for piece in re.split(r"[,\n\r]", raw):
        item = _strip_item(piece)
        if not item:
            continue
        key = normalize_name(item)
        if key in seen:
            continue
        seen.add(key)
        items.append(item)
        if len(items) >= MAX_PARSED_ITEMS:
            break
    return items


def parse_fragments(raw: str) -> list[str]:
    """Split a generation into whole-line fragments for hand curation.

    Unlike parse_response this never splits on commas and keeps trailing
    punctuation, so fragments stay verbatim sentences; only surrounding
    whitespace, list markers and quote pairs are removed.
    """
    fragments: list[str] = []
    seen: set[str] = set()
    for line in raw.splitlines():
        prev = None
        s = line
        while s != prev:
            prev = s
            s = s.strip()
            s = _BULLET.sub("", s)
            s = _strip_quote_pair(s)
        if s and s not in seen:
            seen.add(s)
            fragments.append(s)
    return fragments


@dataclass
class BuildReport:
    """Counters for one build run; invalid items are dropped but tallied."""

    queries: int = 0
    parsed_items: int = 0
    rejected_items: int = 0
    validator_errors: int = 0


class BuildError(RuntimeError):
    """Build aborted; carries the graph grown so far."""

    def __init__(self, message: str, partial_graph: MapGraph):
        super().__init__(message)
        self.partial_graph = partial_graph


@dataclass
class MapperState:
    """Working state of the iterative mapping loop."""

    template: PromptTemplate
    max_queries: int
    graph: MapGraph = field(default_factory=MapGraph)
    seed_queue: deque[str] = field(default_factory=deque)
    queried: set[str] = field(default_factory=set)
    query_count: int = 0
    current: int | None = None
    _pending: set[str] = field(default_factory=set)

    def enqueue_seed(self, seed: str) -> bool:
        key = normalize_name(seed)
        if not key:
            raise ValueError("seed is empty after normalization")
        if key in self._pending or key in self.queried:
            return False
        self.seed_queue.append(seed)
        self._pending.add(key)
        return True

    def has_work(self) -> bool:
        return self.query_count < self.max_queries and bool(self.seed_queue)

    def step(
        self,
        backend: GenerationBackend,
        validator: ResponseValidator,
        clock: Callable[[], str] = utc_now,
        report: BuildReport | None = None,
    ) -> None:
        """Consume one seed: prompt, parse, validate, and grow the graph."""
        seed = self.seed_queue.popleft()
        key = normalize_name(seed)
        self._pending.discard(key)
        if key in self.queried:
            return
        self.queried.add(key)
        cur = self.graph.add_node(seed)
        self.current = cur
        self.graph.nodes[cur].query_count += 1
        prompt = self.template.render(seed)
        try:
            raw = backend.generate(prompt)
        except BackendError as exc:
            raise BuildError(
                f"generation backend failed for seed {seed!r}: {exc}", self.graph
            ) from exc
        self.query_count += 1
        if report is not None:
            report.queries += 1
        if raw.strip():  # an all-whitespace generation is no topic text
            self.graph.nodes[cur].topics.append(
                TopicText(raw, source=GENERATED, prompt=prompt, created_at=clock())
            )
        for item in parse_response(raw):
            if report is not None:
                report.parsed_items += 1
            try:
                ok = validator.is_valid(item)
            except ValidatorError as exc:
                log.warning("validator failed on %r (%s); item skipped", item, exc)
                if report is not None:
                    report.validator_errors += 1
                continue
            if not ok:
                if report is not None:
                    report.rejected_items += 1
                continue
            existing = self.graph.node_by_name(item)
            if existing is not None:
                self.graph.nodes[existing].query_count += 1
                if existing != cur:
                    self.graph.connect(existing, cur)
            elif normalize_name(item) not in self.queried:
                if self.enqueue_seed(item):
                    new_id = self.graph.add_node(item)
                    self.graph.nodes[new_id].query_count += 1
                    self.graph.connect(new_id, cur)
                # an item naming a still-pending seed without a node is dropped


def build_map(
    template: PromptTemplate | str,
    seeds: Sequence[str],
    max_queries: int,
    backend: GenerationBackend,
    validator: ResponseValidator,
    *,
    clock: Callable[[], str] = utc_now,
    report: BuildReport | None = None,
) -> MapGraph:
    """Run the iterative mapping loop until the query budget or queue runs out.

    Returns the grown graph with positions unset. A backend failure aborts the
    run with a BuildError carrying the partial graph.
    """
    if max_queries < 1:
        raise ValueError(f"max_queries must be >= 1, got {max_queries}")
    if not seeds:
        raise ValueError("at least one initial seed is required")
    tpl = template if isinstance(template, PromptTemplate) else PromptTemplate(template)
    state = MapperState(template=tpl, max_queries=max_queries)
    for seed in seeds:
        state.enqueue_seed(seed)
    while state.has_work():
        state.step(backend, validator, clock=clock, report=report)
    return state.graph
