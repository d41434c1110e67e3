"""Packaged demo fixtures: a curated rules-of-engagement map, the two-agent
order scenario that plays over it, and canned generation backends."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..graph import MANUAL, MapGraph, TopicText
from ..layout import LayoutParams, run_layout
from ..script import ScriptStep, load_script

ROE_MAP_JSON = "roe_map.json"
ROE_SCRIPT_JSON = "roe_script.json"
ROE_BACKEND_TSV = "roe_backend.tsv"
CENTRAL_AMERICA_TSV = "central_america.tsv"

ROE_PROMPT_TEMPLATE = "Here's a short list of military rules of engagement like '{}':"
ROE_PROMPT_SEED = "It is better to overreact than underreact"

_LAWFUL = "lawful"
_TRANSITIONAL = "transitional"
_LAWLESS = "lawless"

# (name, group, query_count, topic texts)
_ROE_NODES = [
    ("careful", _LAWFUL, 5, [
        "You must obtain positive identification of the target as hostile before firing.",
        "Operate at heightened awareness during a cease-fire. Double the patrols and report any insurgent activity you spot.",
        "Verify targets before engaging. Anything spotted in the process of preparing an attack must be confirmed first.",
    ]),
    ("duty", _LAWFUL, 3, [
        "It is the soldier’s responsibility to disobey an illegal order and not participate in committing a war crime.",
        "We have explicit orders and a duty not to engage Enemy forces unless fired upon. Hold your fire.",
    ]),
    ("ethical", _LAWFUL, 2, [
        "An unlawful order must be refused. Committing a war crime is never acceptable.",
    ]),
    ("hold fire", _LAWFUL, 2, [
        "Hold fire unless fired upon. Stand down until the order is given.",
    ]),
    ("responsible", _TRANSITIONAL, 1, [
        "Each soldier is responsible for the consequences of every round fired.",
    ]),
    ("proportional", _TRANSITIONAL, 1, [
        "Respond with force proportional to the threat you face.",
    ]),
    ("self-protect", _TRANSITIONAL, 3, [
        "If we have casualties at the gate, weapons free. Protect yourselves and protect the base.",
        "You have the right to protect yourself and your unit at all times.",
    ]),
    ("fire back", _LAWLESS, 2, [
        "It is better to have expended all of your ammunition than to have none left when you need it.",
        "If you take fire, return fire immediately.",
    ]),
    ("masculine", _LAWLESS, 4, [
        "It is better to overreact than underreact.",
        "A good plan violently executed now is better than a perfect plan next week.",
    ]),
    ("kill the enemy", _LAWLESS, 6, [
        "If in doubt, empty your magazine.",
        "The purpose of a battle is to defeat the enemy. There is no other purpose.",
        "Take them out before they attack. Shoot first and kill these guys before they kill us.",
        "Don't let any survivors get away. It's about getting every last one of these bastards.",
    ]),
    ("the enemy", _LAWLESS, 2, [
        "The enemy is everywhere. All units take down any enemy you see.",
        "Engage the enemy wherever they appear.",
    ]),
]

_ROE_EDGES = [
    ("ethical", "duty"),
    ("duty", "careful"),
    ("careful", "hold fire"),
    ("hold fire", "proportional"),
    ("proportional", "responsible"),
    ("responsible", "self-protect"),
    ("self-protect", "fire back"),
    ("fire back", "kill the enemy"),
    ("fire back", "masculine"),
    ("masculine", "kill the enemy"),
    ("kill the enemy", "the enemy"),
]


def roe_demo_map(layout_seed: int = 42) -> MapGraph:
    """Build the curated demo map deterministically and lay it out."""
    graph = MapGraph()
    for name, group, query_count, topics in _ROE_NODES:
        node_id = graph.add_node(name, group=group)
        node = graph.nodes[node_id]
        node.query_count = query_count
        for text in topics:
            node.topics.append(TopicText(text, source=MANUAL))
    for a, b in _ROE_EDGES:
        graph.connect(graph.node_by_name(a), graph.node_by_name(b))
    run_layout(graph, LayoutParams(seed=layout_seed))
    return graph


def fixture_path(name: str) -> Path:
    """Filesystem path of a packaged fixture file."""
    return Path(resources.files(__package__) / name)


def fixture_text(name: str) -> str:
    return (resources.files(__package__) / name).read_text(encoding="utf-8")


def load_roe_map() -> MapGraph:
    return MapGraph.from_json(fixture_text(ROE_MAP_JSON))


def load_roe_script() -> list[ScriptStep]:
    return load_script(fixture_text(ROE_SCRIPT_JSON))
