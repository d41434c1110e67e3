from __future__ import annotations

import random
import string

import pytest

from nnm.graph import MapGraph
from nnm.similarity import HashedBagEmbedder


FIXED_CLOCK = lambda: "2021-12-22T00:00:00+00:00"  # noqa: E731


@pytest.fixture
def embedder() -> HashedBagEmbedder:
    return HashedBagEmbedder()


_NAME_CHARS = string.ascii_letters + string.digits + ' "\\\'-_'


def random_gml_graph(rng: random.Random) -> MapGraph:
    """A random graph restricted to what GML carries (no topics, no seed)."""
    graph = MapGraph()
    ids: list[int] = []
    for _ in range(rng.randint(0, 12)):
        name = "".join(rng.choice(_NAME_CHARS) for _ in range(rng.randint(1, 12)))
        if not name.strip():
            continue
        before = len(graph.nodes)
        node_id = graph.add_node(name, group=rng.choice([None, "alpha", 'we"ird\\group']))
        if len(graph.nodes) == before:
            continue  # normalized duplicate
        node = graph.nodes[node_id]
        node.query_count = rng.randint(0, 9)
        if rng.random() < 0.8:
            node.position = (rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3))
        ids.append(node_id)
    for _ in range(rng.randint(0, 3 * max(1, len(ids)))):
        if len(ids) < 2:
            break
        a, b = rng.sample(ids, 2)
        graph.connect(a, b)
    return graph
