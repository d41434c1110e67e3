"""GML (Graph Modeling Language) export/import for map graphs.

The emitted subset is deterministic: nodes in ascending id order, edges in
ascending (source, target) order, floats in shortest round-trip form. Topic
texts are not part of GML; the JSON map document keeps full fidelity.
"""

from __future__ import annotations

from .graph import MapGraph, MapNode, normalize_name


class GmlError(ValueError):
    """Malformed GML document; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _fmt(x: float) -> str:
    # repr() is the shortest decimal string that reads back to the same float
    return repr(float(x))


def export_gml(graph: MapGraph) -> str:
    """Serialize a graph to the GML subset, byte-deterministically."""
    graph.validate()
    lines = ["graph [", "  directed 0"]
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        lines.append("  node [")
        lines.append(f"    id {node.id}")
        lines.append(f"    label {_quote(node.name)}")
        if node.group is not None:
            lines.append(f"    group {_quote(node.group)}")
        lines.append(f"    value {node.query_count}")
        if node.position is not None:
            lines.append("    graphics [")
            lines.append(f"      x {_fmt(node.position[0])}")
            lines.append(f"      y {_fmt(node.position[1])}")
            lines.append("    ]")
        lines.append("  ]")
    for a, b in sorted(graph.edges):
        lines.append("  edge [")
        lines.append(f"    source {a}")
        lines.append(f"    target {b}")
        lines.append("  ]")
    lines.append("]")
    return "\n".join(lines) + "\n"


# -- parsing ------------------------------------------------------------------

_LBRACKET = "lbracket"
_RBRACKET = "rbracket"
_STRING = "string"
_NUMBER = "number"
_IDENT = "ident"


def _tokenize(doc: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i, line = 0, 1
    n = len(doc)
    while i < n:
        c = doc[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r\f\v":
            i += 1
        elif c == "[":
            tokens.append((_LBRACKET, "[", line))
            i += 1
        elif c == "]":
            tokens.append((_RBRACKET, "]", line))
            i += 1
        elif c == '"':
            start_line = line
            i += 1
            out: list[str] = []
            while True:
                if i >= n:
                    raise GmlError("unterminated string", start_line)
                c = doc[i]
                if c == "\\" and i + 1 < n and doc[i + 1] in '"\\':
                    out.append(doc[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    if c == "\n":
                        line += 1
                    out.append(c)
                    i += 1
            tokens.append((_STRING, "".join(out), start_line))
        elif c.isdigit() or c in "+-.":
            j = i
            while j < n and (doc[j].isdigit() or doc[j] in "+-.eE"):
                j += 1
            text = doc[i:j]
            try:
                value: object = int(text)
            except ValueError:
                try:
                    value = float(text)
                except ValueError:
                    raise GmlError(f"bad number {text!r}", line) from None
            tokens.append((_NUMBER, value, line))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (doc[j].isalnum() or doc[j] == "_"):
                j += 1
            tokens.append((_IDENT, doc[i:j], line))
            i = j
        else:
            raise GmlError(f"unexpected character {c!r}", line)
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, object, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, object, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str | None = None) -> tuple[str, object, int]:
        tok = self.peek()
        if tok is None:
            last_line = self.tokens[-1][2] if self.tokens else 1
            raise GmlError("unexpected end of document", last_line)
        if expected is not None and tok[0] != expected:
            raise GmlError(f"expected {expected}, got {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def parse_block(self) -> list[tuple[str, object, int]]:
        """Items between '[' and ']': (key, scalar-or-nested-list, line)."""
        items: list[tuple[str, object, int]] = []
        while True:
            tok = self.peek()
            if tok is None:
                last_line = self.tokens[-1][2] if self.tokens else 1
                raise GmlError("unexpected end of document (missing ']')", last_line)
            if tok[0] == _RBRACKET:
                self.next()
                return items
            kind, key, line = self.next(_IDENT)
            vtok = self.peek()
            if vtok is None:
                raise GmlError(f"key {key!r} has no value", line)
            if vtok[0] == _LBRACKET:
                self.next()
                items.append((str(key), self.parse_block(), line))
            elif vtok[0] in (_STRING, _NUMBER, _IDENT):
                self.next()
                items.append((str(key), vtok[1], line))
            else:
                raise GmlError(f"unexpected value for key {key!r}", vtok[2])


def _get_scalar(items: list, key: str, kinds: tuple[type, ...], block_line: int):
    for k, v, line in items:
        if k == key:
            if not isinstance(v, kinds):
                raise GmlError(f"{key} has the wrong type", line)
            return v, line
    return None, block_line


def import_gml(doc: str) -> MapGraph:
    """Parse a GML document into a MapGraph; unknown keys are ignored."""
    parser = _Parser(_tokenize(doc))
    kind, key, line = parser.next(_IDENT)
    while key != "graph":
        # tolerate leading metadata such as `Creator "..."`
        vtok = parser.next()
        if vtok[0] == _LBRACKET:
            parser.parse_block()
        kind, key, line = parser.next(_IDENT)
    parser.next(_LBRACKET)
    items = parser.parse_block()

    graph = MapGraph()
    seen_names: dict[str, int] = {}
    edge_items: list[tuple[list, int]] = []
    for k, v, item_line in items:
        if k == "directed":
            if v != 0:
                raise GmlError("only undirected graphs (directed 0) are supported", item_line)
        elif k == "node":
            if not isinstance(v, list):
                raise GmlError("node must be a block", item_line)
            node_id, _ = _get_scalar(v, "id", (int,), item_line)
            if node_id is None:
                raise GmlError("node has no id", item_line)
            label, label_line = _get_scalar(v, "label", (str,), item_line)
            if label is None or not normalize_name(label):
                raise GmlError(f"node {node_id} has no usable label", label_line)
            group, _ = _get_scalar(v, "group", (str,), item_line)
            value, value_line = _get_scalar(v, "value", (int,), item_line)
            query_count = int(value) if value is not None else 0
            if query_count < 0:
                raise GmlError(f"node {node_id} has negative value", value_line)
            position = None
            for gk, gv, gline in v:
                if gk == "graphics" and isinstance(gv, list):
                    x, xline = _get_scalar(gv, "x", (int, float), gline)
                    y, yline = _get_scalar(gv, "y", (int, float), gline)
                    if x is None or y is None:
                        raise GmlError(f"node {node_id} graphics needs x and y", gline)
                    position = (float(x), float(y))
            if node_id in graph.nodes:
                raise GmlError(f"duplicate node id {node_id}", item_line)
            key_name = normalize_name(label)
            if key_name in seen_names:
                raise GmlError(f"duplicate node label {label!r}", label_line)
            seen_names[key_name] = node_id
            graph.nodes[node_id] = MapNode(
                id=node_id, name=label, group=group,
                query_count=query_count, position=position,
            )
        elif k == "edge":
            if not isinstance(v, list):
                raise GmlError("edge must be a block", item_line)
            edge_items.append((v, item_line))
        # anything else: tolerated and ignored

    for v, item_line in edge_items:
        source, _ = _get_scalar(v, "source", (int,), item_line)
        target, _ = _get_scalar(v, "target", (int,), item_line)
        if source is None or target is None:
            raise GmlError("edge needs source and target", item_line)
        if source == target:
            raise GmlError(f"self-loop on node {source}", item_line)
        if source not in graph.nodes or target not in graph.nodes:
            raise GmlError(f"edge ({source}, {target}) references a missing node", item_line)
        graph.edges.add((source, target) if source < target else (target, source))

    graph._by_name.update(seen_names)
    graph._next_id = max(graph.nodes, default=-1) + 1
    graph.validate()
    return graph
