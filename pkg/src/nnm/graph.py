"""Core map data model: named concept nodes, topic texts, and undirected edges."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

SCHEMA_VERSION = 1

_ASCII_WS = " \t\r\n\f\v"
_WS_RUN = re.compile(r"[ \t\r\n\f\v]+")

GENERATED = "generated"
MANUAL = "manual"
_SOURCES = (GENERATED, MANUAL)


def display_name(name: str) -> str:
    """Trim ASCII whitespace and collapse internal runs, keeping the casing."""
    return _WS_RUN.sub(" ", name.strip(_ASCII_WS))


def normalize_name(name: str) -> str:
    """Identity form of a node name: collapsed whitespace, lowercased."""
    return display_name(name).lower()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class TopicText:
    """One generated or hand-entered text fragment assigned to a node."""

    text: str
    source: str = GENERATED
    prompt: str | None = None
    created_at: str = ""

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("topic text must be non-empty")
        if self.source not in _SOURCES:
            raise ValueError(f"unknown topic source {self.source!r}")

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "source": self.source,
            "prompt": self.prompt,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> TopicText:
        return cls(
            text=d["text"],
            source=d.get("source", GENERATED),
            prompt=d.get("prompt"),
            created_at=d.get("created_at", ""),
        )


@dataclass
class MapNode:
    """A named concept cluster; query_count drives its displayed size."""

    id: int
    name: str
    group: str | None = None
    topics: list[TopicText] = field(default_factory=list)
    query_count: int = 0
    position: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "group": self.group,
            "query_count": self.query_count,
            "position": list(self.position) if self.position is not None else None,
            "topics": [t.to_dict() for t in self.topics],
        }

    @classmethod
    def from_dict(cls, d: dict) -> MapNode:
        pos = d.get("position")
        return cls(
            id=int(d["id"]),
            name=d["name"],
            group=d.get("group"),
            topics=[TopicText.from_dict(t) for t in d.get("topics", [])],
            query_count=int(d.get("query_count", 0)),
            position=(float(pos[0]), float(pos[1])) if pos is not None else None,
        )


class MapGraph:
    """Undirected map of concept nodes.

    Node names are unique under normalization (lowercased, collapsed
    whitespace); the first-seen casing is kept for display. Edges are an
    unordered-pair set with no self-loops. Value-semantic and single-writer;
    callers serialize concurrent mutation.
    """

    def __init__(self, schema_version: int = SCHEMA_VERSION, layout_seed: int | None = None):
        self.nodes: dict[int, MapNode] = {}
        self.edges: set[tuple[int, int]] = set()
        self.schema_version = schema_version
        self.layout_seed = layout_seed
        self._by_name: dict[str, int] = {}
        self._next_id = 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MapGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.schema_version == other.schema_version
            and self.layout_seed == other.layout_seed
        )

    def __repr__(self) -> str:
        return f"MapGraph(nodes={len(self.nodes)}, edges={len(self.edges)})"

    # -- lookups ------------------------------------------------------------

    def node_by_name(self, name: str) -> int | None:
        """Id of the node whose normalized name matches, or None."""
        return self._by_name.get(normalize_name(name))

    def node(self, node_id: int) -> MapNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise KeyError(f"no node with id {node_id}") from None

    def degree(self, node_id: int) -> int:
        return sum(1 for a, b in self.edges if node_id in (a, b))

    # -- mutation -----------------------------------------------------------

    def add_node(self, name: str, group: str | None = None) -> int:
        """Add a node, returning the existing id if the name is already present."""
        shown = display_name(name)
        key = shown.lower()
        if not key:
            raise ValueError("node name is empty after normalization")
        existing = self._by_name.get(key)
        if existing is not None:
            return existing
        node_id = self._next_id
        self._next_id += 1
        self.nodes[node_id] = MapNode(id=node_id, name=shown, group=group)
        self._by_name[key] = node_id
        return node_id

    def connect(self, a: int, b: int) -> None:
        """Add the undirected edge (a, b); duplicate calls are no-ops."""
        if a == b:
            raise ValueError(f"self-loop on node {a} rejected")
        if a not in self.nodes:
            raise ValueError(f"cannot connect: no node with id {a}")
        if b not in self.nodes:
            raise ValueError(f"cannot connect: no node with id {b}")
        self.edges.add((a, b) if a < b else (b, a))

    # -- integrity ----------------------------------------------------------

    def validate(self) -> None:
        """Raise ValueError on any referential-integrity violation."""
        seen: dict[str, int] = {}
        for node_id, node in self.nodes.items():
            if node.id != node_id:
                raise ValueError(f"node id mismatch: key {node_id} vs field {node.id}")
            key = normalize_name(node.name)
            if not key:
                raise ValueError(f"node {node_id} has an empty name")
            if key in seen:
                raise ValueError(f"duplicate node name {node.name!r} (ids {seen[key]}, {node_id})")
            seen[key] = node_id
            if node.query_count < 0:
                raise ValueError(f"node {node_id} has negative query_count")
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge ({a}, {b}) references a missing node")

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "layout_seed": self.layout_seed,
            "nodes": [self.nodes[i].to_dict() for i in sorted(self.nodes)],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> MapGraph:
        import json

        return cls.from_dict(json.loads(text))

    @classmethod
    def from_dict(cls, d: dict) -> MapGraph:
        graph = cls(
            schema_version=int(d.get("schema_version", SCHEMA_VERSION)),
            layout_seed=d.get("layout_seed"),
        )
        for nd in d.get("nodes", []):
            node = MapNode.from_dict(nd)
            if node.id in graph.nodes:
                raise ValueError(f"duplicate node id {node.id}")
            graph.nodes[node.id] = node
            graph._by_name[normalize_name(node.name)] = node.id
        graph._next_id = max(graph.nodes, default=-1) + 1
        for a, b in d.get("edges", []):
            graph.connect(int(a), int(b))
        graph.validate()
        return graph
